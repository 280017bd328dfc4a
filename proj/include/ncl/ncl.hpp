#ifndef NCL_NCL_HPP
#define NCL_NCL_HPP

// Umbrella header for the whole library.

#include "ncl/causality/ccc.hpp"
#include "ncl/causality/etc.hpp"
#include "ncl/causality/granger.hpp"
#include "ncl/chaosfex.hpp"
#include "ncl/chaosnet.hpp"
#include "ncl/dynamics.hpp"
#include "ncl/error.hpp"
#include "ncl/harness/dataset.hpp"
#include "ncl/harness/experiments.hpp"
#include "ncl/harness/io.hpp"
#include "ncl/harness/parallel.hpp"
#include "ncl/metrics.hpp"
#include "ncl/mlp.hpp"

#endif // NCL_NCL_HPP
