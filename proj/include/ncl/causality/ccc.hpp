#ifndef NCL_CAUSALITY_CCC_HPP
#define NCL_CAUSALITY_CCC_HPP

/** @file
 * Compression-Complexity Causality (CCC) over sliding windows.
 *
 * For a window starting at t with past length L and future length w:
 *
 *   CC(dY | Y)    = ETC(Ypast + dY) - ETC(Ypast)
 *   CC(dY | X, Y) = ETCjoint(Ypast + dY, Xpast + dY) - ETCjoint(Ypast, Xpast)
 *   CCC(X -> Y)   = mean over windows of CC(dY | Y) - CC(dY | X, Y)
 *
 * with normalized ETC values and '+' denoting concatenation. Windows start
 * at t = L, L + delta, ... while t + w <= length.
 */

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "ncl/causality/etc.hpp"
#include "ncl/error.hpp"

namespace ncl {

struct ccc_config {
    std::size_t L = 100;    // past window length
    std::size_t w = 15;     // length of the future window dY
    std::size_t delta = 50; // step between window starts
    std::size_t B = 4;      // bins
};

inline void validate(const ccc_config& c) {
    detail::require(c.L >= 1, "ccc: L must be >= 1");
    detail::require(c.w >= 1, "ccc: w must be >= 1");
    detail::require(c.delta >= 1, "ccc: delta must be >= 1");
    detail::require(c.B >= 2, "ccc: B must be >= 2");
}

/// Per-window terms, exposed for diagnostics.
struct ccc_window {
    std::size_t start = 0;
    double cc_own = 0.0;   // CC(dY | Ypast)
    double cc_joint = 0.0; // CC(dY | Xpast, Ypast)
};

/// CCC from already-symbolized sequences.
inline double ccc_symbolic(std::span<const symbol> x, std::span<const symbol> y, const ccc_config& cfg,
                           std::vector<ccc_window>* windows = nullptr) {
    validate(cfg);
    if (x.size() != y.size()) throw dimension_error("ccc: series differ in length");
    if (y.size() < cfg.L + cfg.w)
        throw config_error("ccc: series of length " + std::to_string(y.size()) + " shorter than L + w = " +
                           std::to_string(cfg.L + cfg.w));

    double total = 0.0;
    std::size_t count = 0;
    std::vector<symbol> y_ext, x_ext;
    for (std::size_t t = cfg.L; t + cfg.w <= y.size(); t += cfg.delta) {
        const auto y_past = y.subspan(t - cfg.L, cfg.L);
        const auto x_past = x.subspan(t - cfg.L, cfg.L);
        const auto dy = y.subspan(t, cfg.w);

        y_ext.assign(y_past.begin(), y_past.end());
        y_ext.insert(y_ext.end(), dy.begin(), dy.end());
        x_ext.assign(x_past.begin(), x_past.end());
        x_ext.insert(x_ext.end(), dy.begin(), dy.end());

        const double cc_own = etc_normalized(y_ext) - etc_normalized(y_past);
        const double cc_joint = etc_joint_normalized(y_ext, x_ext) - etc_joint_normalized(y_past, x_past);
        if (windows) windows->push_back({t, cc_own, cc_joint});
        total += cc_own - cc_joint;
        ++count;
    }
    return total / static_cast<double>(count);
}

/// CCC in the direction x -> y. Each series is binned over its own range.
inline double ccc(std::span<const double> x, std::span<const double> y, const ccc_config& cfg,
                  std::vector<ccc_window>* windows = nullptr) {
    validate(cfg);
    if (x.size() != y.size()) throw dimension_error("ccc: series differ in length");
    if (y.size() < cfg.L + cfg.w)
        throw config_error("ccc: series of length " + std::to_string(y.size()) + " shorter than L + w = " +
                           std::to_string(cfg.L + cfg.w));
    const auto xs = symbolize(x, cfg.B);
    const auto ys = symbolize(y, cfg.B);
    return ccc_symbolic(xs.symbols, ys.symbols, cfg, windows);
}

} // namespace ncl

#endif // NCL_CAUSALITY_CCC_HPP
