#ifndef NCL_ERROR_HPP
#define NCL_ERROR_HPP

#include <stdexcept>
#include <string>

namespace ncl {

/// Base class for every error raised by the library.
struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// An argument or configuration violates a documented invariant.
struct config_error : error {
    using error::error;
};

/// A value lies outside the domain of a map or transform.
struct domain_error : error {
    using error::error;
};

/// Two sequences or vectors that must agree in size do not.
struct dimension_error : error {
    using error::error;
};

/// Normal equations of a regression are singular or numerically so.
struct rank_deficient_error : error {
    using error::error;
};

/// Training produced a non-finite loss.
struct divergence_error : error {
    using error::error;
};

/// Malformed input file or failing file operation.
struct io_error : error {
    using error::error;
};

namespace detail {

inline void require(bool ok, const std::string& what) {
    if (!ok) throw config_error(what);
}

} // namespace detail
} // namespace ncl

#endif // NCL_ERROR_HPP
