#ifndef NCL_DYNAMICS_HPP
#define NCL_DYNAMICS_HPP

/** @file
 * One-dimensional chaotic maps and the unidirectionally coupled
 * (master -> slave) generators used to simulate cause/effect pairs.
 */

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include "ncl/error.hpp"

namespace ncl {

using series = std::vector<double>;

struct skew_tent_params {
    double b = 0.499;
};

struct logistic_params {
    double A = 4.0;
};

/// Either map a coupled-map generator can drive.
using map_spec = std::variant<skew_tent_params, logistic_params>;

inline void validate(const skew_tent_params& p) {
    if (!(p.b > 0.0 && p.b < 1.0))
        throw config_error("skew tent parameter b must lie in (0,1), got " + std::to_string(p.b));
}

inline void validate(const logistic_params& p) {
    if (!(p.A > 0.0 && p.A <= 4.0))
        throw config_error("logistic parameter A must lie in (0,4], got " + std::to_string(p.A));
}

/// T(x) = x/b on [0,b), (1-x)/(1-b) on [b,1]. x == b takes the second branch.
inline double skew_tent_step(double x, const skew_tent_params& p) {
    if (!(x >= 0.0 && x <= 1.0))
        throw domain_error("skew tent input outside [0,1]: " + std::to_string(x));
    return x < p.b ? x / p.b : (1.0 - x) / (1.0 - p.b);
}

inline double logistic_step(double x, const logistic_params& p) {
    if (!(x >= 0.0 && x <= 1.0))
        throw domain_error("logistic input outside [0,1]: " + std::to_string(x));
    return p.A * x * (1.0 - x);
}

inline double map_step(double x, const map_spec& m) {
    return std::visit(
        [x](const auto& p) -> double {
            using P = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<P, skew_tent_params>)
                return skew_tent_step(x, p);
            else
                return logistic_step(x, p);
        },
        m);
}

inline void validate(const map_spec& m) {
    std::visit([](const auto& p) { validate(p); }, m);
}

inline std::string describe(const map_spec& m) {
    return std::visit(
        [](const auto& p) -> std::string {
            using P = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<P, skew_tent_params>)
                return "tent(b=" + std::to_string(p.b) + ")";
            else
                return "logistic(A=" + std::to_string(p.A) + ")";
        },
        m);
}

struct coupled_map_config {
    map_spec master_map = skew_tent_params{0.65};
    map_spec slave_map = skew_tent_params{0.47};
    double eta = 0.0;
    std::size_t length = 2000;
    std::size_t transient = 500;
    std::uint64_t seed = 0;
};

struct coupled_ar_config {
    double a1 = 0.8;
    double a2 = 0.9;
    double gamma = 0.03;
    double eta = 0.0;
    std::size_t length = 2000;
    std::size_t transient = 500;
    std::uint64_t seed = 0;
};

/// One simulated trial. Master is the cause, slave the effect.
struct time_series_pair {
    series master;
    series slave;
    std::string tag;
};

inline void validate(const coupled_map_config& c) {
    validate(c.master_map);
    validate(c.slave_map);
    detail::require(c.eta >= 0.0 && c.eta <= 1.0, "coupling eta must lie in [0,1]");
    detail::require(c.length >= 1, "length must be >= 1");
}

inline void validate(const coupled_ar_config& c) {
    detail::require(c.gamma >= 0.0, "noise intensity gamma must be >= 0");
    detail::require(c.eta >= 0.0 && c.eta <= 1.0, "coupling eta must lie in [0,1]");
    detail::require(c.length >= 1, "length must be >= 1");
}

/// splitmix64 finalizer; decorrelates (base seed, index) into a stream seed.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
    std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

namespace detail {

inline double open_unit(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double v = u(rng);
    while (v <= 0.0) v = u(rng);
    return v;
}

} // namespace detail

/// M(n) = T1(M(n-1)), S(n) = (1-eta) T2(S(n-1)) + eta M(n-1), random
/// initial values in (0,1), first `transient` samples dropped.
inline time_series_pair generate_coupled_map_pair(const coupled_map_config& cfg) {
    validate(cfg);
    std::mt19937_64 rng(cfg.seed);
    double m = detail::open_unit(rng);
    double s = detail::open_unit(rng);

    time_series_pair out;
    out.master.reserve(cfg.length);
    out.slave.reserve(cfg.length);
    const std::size_t total = cfg.transient + cfg.length;
    for (std::size_t n = 0; n < total; ++n) {
        if (n > 0) {
            const double m_prev = m;
            m = map_step(m_prev, cfg.master_map);
            s = (1.0 - cfg.eta) * map_step(s, cfg.slave_map) + cfg.eta * m_prev;
            // Rounding can push the convex combination a hair past 1.
            if (s > 1.0) s = 1.0;
        }
        if (n >= cfg.transient) {
            out.master.push_back(m);
            out.slave.push_back(s);
        }
    }
    out.tag = "coupled-map master=" + describe(cfg.master_map) + " slave=" + describe(cfg.slave_map) +
              " eta=" + std::to_string(cfg.eta) + " seed=" + std::to_string(cfg.seed);
    return out;
}

/// M(t) = a1 M(t-1) + gamma r1(t), S(t) = a2 S(t-1) + eta M(t-1) + gamma r2(t)
/// with independent standard-normal r1, r2.
inline time_series_pair generate_coupled_ar_pair(const coupled_ar_config& cfg) {
    validate(cfg);
    std::mt19937_64 rng(cfg.seed);
    double m = detail::open_unit(rng);
    double s = detail::open_unit(rng);
    std::normal_distribution<double> noise(0.0, 1.0);

    time_series_pair out;
    out.master.reserve(cfg.length);
    out.slave.reserve(cfg.length);
    const std::size_t total = cfg.transient + cfg.length;
    for (std::size_t t = 0; t < total; ++t) {
        if (t > 0) {
            const double r_master = noise(rng);
            const double r_slave = noise(rng);
            const double m_prev = m;
            m = cfg.a1 * m_prev + cfg.gamma * r_master;
            s = cfg.a2 * s + cfg.eta * m_prev + cfg.gamma * r_slave;
        }
        if (t >= cfg.transient) {
            out.master.push_back(m);
            out.slave.push_back(s);
        }
    }
    out.tag = "coupled-ar a1=" + std::to_string(cfg.a1) + " a2=" + std::to_string(cfg.a2) +
              " gamma=" + std::to_string(cfg.gamma) + " eta=" + std::to_string(cfg.eta) +
              " seed=" + std::to_string(cfg.seed);
    return out;
}

/// Noise-free variant used to pin initial values; r(t) is not drawn.
inline time_series_pair generate_coupled_ar_pair(const coupled_ar_config& cfg, double m0, double s0) {
    validate(cfg);
    detail::require(cfg.gamma == 0.0, "explicit initial values are only supported for gamma == 0");
    time_series_pair out;
    double m = m0;
    double s = s0;
    for (std::size_t t = 0; t < cfg.transient + cfg.length; ++t) {
        if (t > 0) {
            const double m_prev = m;
            m = cfg.a1 * m_prev;
            s = cfg.a2 * s + cfg.eta * m_prev;
        }
        if (t >= cfg.transient) {
            out.master.push_back(m);
            out.slave.push_back(s);
        }
    }
    out.tag = "coupled-ar noise-free";
    return out;
}

/**
 * Mean absolute difference between master and slave.
 *
 * lag = 0 compares M(i) with S(i). lag = k compares M(i) with S(i + k), the
 * alignment under which a fully driven slave copies the master.
 */
inline double synchronization_error(const time_series_pair& pair, std::size_t lag = 0) {
    if (pair.master.size() != pair.slave.size())
        throw dimension_error("synchronization_error: master and slave differ in length");
    if (pair.master.size() <= lag)
        throw dimension_error("synchronization_error: series shorter than lag + 1");
    const std::size_t n = pair.master.size() - lag;
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += std::abs(pair.master[i] - pair.slave[i + lag]);
    return acc / static_cast<double>(n);
}

} // namespace ncl

#endif // NCL_DYNAMICS_HPP
