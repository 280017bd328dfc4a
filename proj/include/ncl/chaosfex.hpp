#ifndef NCL_CHAOSFEX_HPP
#define NCL_CHAOSFEX_HPP

/** @file
 * GLS neuron firing and ChaosFEX feature extraction.
 *
 * A GLS neuron is a skew tent map iterated from an initial activity q. For a
 * stimulus s the neuron fires until its trace enters the open ball of radius
 * epsilon around s. Four features summarise the pre-recognition trace
 * y(0..N-1): firing time N, firing rate R, energy E and symbolic entropy H.
 */

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "ncl/dynamics.hpp"
#include "ncl/error.hpp"

namespace ncl {

struct neurochaos_config {
    double q = 0.56;
    double b = 0.499;
    double epsilon = 0.171;
    std::size_t max_iter = 10000;
};

inline void validate(const neurochaos_config& c) {
    detail::require(c.q > 0.0 && c.q < 1.0, "neurochaos q must lie in (0,1)");
    detail::require(c.b > 0.0 && c.b < 1.0, "neurochaos b must lie in (0,1)");
    detail::require(c.epsilon > 0.0, "neurochaos epsilon must be > 0");
    detail::require(c.max_iter >= 1, "neurochaos max_iter must be >= 1");
}

struct neural_trace {
    std::vector<double> samples;
    bool recognized = false;
};

struct symbolic_trace {
    std::vector<unsigned char> symbols;
    double p0 = 0.0;
    double p1 = 0.0;
};

struct feature_vector {
    double firing_time = 0.0;
    double firing_rate = 0.0;
    double energy = 0.0;
    double entropy = 0.0;

    friend bool operator==(const feature_vector&, const feature_vector&) = default;
};

inline constexpr std::size_t features_per_stimulus = 4;

/// Per-stimulus features of one instance; flattened stimulus-major as
/// (N1, R1, E1, H1, N2, ...).
struct feature_matrix {
    std::vector<feature_vector> rows;
    /// Indices of stimuli whose trace hit max_iter without recognition.
    std::vector<std::size_t> unrecognized;

    std::size_t size() const { return rows.size(); }

    std::vector<double> flatten() const {
        std::vector<double> out;
        out.reserve(rows.size() * features_per_stimulus);
        for (const auto& r : rows) {
            out.push_back(r.firing_time);
            out.push_back(r.firing_rate);
            out.push_back(r.energy);
            out.push_back(r.entropy);
        }
        return out;
    }

    std::vector<double> firing_times() const {
        std::vector<double> out(rows.size());
        std::transform(rows.begin(), rows.end(), out.begin(), [](const auto& r) { return r.firing_time; });
        return out;
    }
};

/// (x - lo)/(hi - lo) clamped to [0,1].
inline std::vector<double> normalize_series(std::span<const double> raw, double lo, double hi) {
    if (!(hi > lo)) throw config_error("normalize_series: degenerate range (hi must exceed lo)");
    std::vector<double> out(raw.size());
    const double scale = hi - lo;
    for (std::size_t i = 0; i < raw.size(); ++i) out[i] = std::clamp((raw[i] - lo) / scale, 0.0, 1.0);
    return out;
}

namespace detail {

inline void check_stimulus(double s) {
    if (!(s >= 0.0 && s <= 1.0)) throw domain_error("stimulus outside [0,1]: " + std::to_string(s));
}

} // namespace detail

inline neural_trace fire_trace(double stimulus, const neurochaos_config& cfg) {
    validate(cfg);
    detail::check_stimulus(stimulus);
    const skew_tent_params map{cfg.b};
    neural_trace out;
    double y = cfg.q;
    for (std::size_t t = 0; t < cfg.max_iter; ++t) {
        if (std::abs(y - stimulus) < cfg.epsilon) {
            out.recognized = true;
            return out;
        }
        out.samples.push_back(y);
        y = skew_tent_step(y, map);
    }
    return out;
}

/// Symbol 1 when y >= b, else 0.
inline symbolic_trace symbolize_trace(const neural_trace& trace, double b) {
    symbolic_trace out;
    out.symbols.reserve(trace.samples.size());
    std::size_t ones = 0;
    for (double y : trace.samples) {
        const unsigned char sym = y >= b ? 1 : 0;
        ones += sym;
        out.symbols.push_back(sym);
    }
    if (!out.symbols.empty()) {
        out.p1 = static_cast<double>(ones) / static_cast<double>(out.symbols.size());
        out.p0 = 1.0 - out.p1;
    }
    return out;
}

namespace detail {

inline double binary_entropy(double p1) {
    double h = 0.0;
    for (double p : {1.0 - p1, p1})
        if (p > 0.0) h -= p * std::log2(p);
    return h;
}

} // namespace detail

inline feature_vector extract_features(const neural_trace& trace, const neurochaos_config& cfg) {
    feature_vector f;
    const std::size_t n = trace.samples.size();
    if (n == 0) return f;
    double energy = 0.0;
    for (double y : trace.samples) energy += y * y;
    const auto sym = symbolize_trace(trace, cfg.b);
    f.firing_time = static_cast<double>(n);
    f.firing_rate = sym.p1;
    f.energy = energy;
    f.entropy = detail::binary_entropy(sym.p1);
    return f;
}

/**
 * A GLS neuron with its orbit from q precomputed.
 *
 * The orbit depends only on (q, b, max_iter), so features for any stimulus
 * follow from a first-passage scan plus prefix sums. Results are bit-identical
 * to extract_features(fire_trace(s)).
 */
class gls_neuron {
public:
    explicit gls_neuron(const neurochaos_config& cfg) : cfg_(cfg) {
        validate(cfg_);
        const skew_tent_params map{cfg_.b};
        orbit_.resize(cfg_.max_iter + 1);
        ones_.assign(cfg_.max_iter + 1, 0);
        energy_.assign(cfg_.max_iter + 1, 0.0);
        double y = cfg_.q;
        for (std::size_t t = 0; t <= cfg_.max_iter; ++t) {
            orbit_[t] = y;
            if (t < cfg_.max_iter) {
                ones_[t + 1] = ones_[t] + (y >= cfg_.b ? 1 : 0);
                energy_[t + 1] = energy_[t] + y * y;
                y = skew_tent_step(y, map);
            }
        }
    }

    const neurochaos_config& config() const { return cfg_; }

    /// First t with |y(t) - s| < epsilon, or max_iter when none exists.
    std::size_t firing_time(double s, bool* recognized = nullptr) const {
        detail::check_stimulus(s);
        for (std::size_t t = 0; t < cfg_.max_iter; ++t) {
            if (std::abs(orbit_[t] - s) < cfg_.epsilon) {
                if (recognized) *recognized = true;
                return t;
            }
        }
        if (recognized) *recognized = false;
        return cfg_.max_iter;
    }

    feature_vector features(double s, bool* recognized = nullptr) const {
        const std::size_t n = firing_time(s, recognized);
        feature_vector f;
        if (n == 0) return f;
        const double p1 = static_cast<double>(ones_[n]) / static_cast<double>(n);
        f.firing_time = static_cast<double>(n);
        f.firing_rate = p1;
        f.energy = energy_[n];
        f.entropy = detail::binary_entropy(p1);
        return f;
    }

private:
    neurochaos_config cfg_;
    std::vector<double> orbit_;
    std::vector<std::size_t> ones_;
    std::vector<double> energy_;
};

inline feature_matrix transform_instance(std::span<const double> instance, const gls_neuron& neuron) {
    feature_matrix out;
    out.rows.reserve(instance.size());
    for (std::size_t i = 0; i < instance.size(); ++i) {
        bool recognized = true;
        out.rows.push_back(neuron.features(instance[i], &recognized));
        if (!recognized) out.unrecognized.push_back(i);
    }
    return out;
}

inline feature_matrix transform_instance(std::span<const double> instance, const neurochaos_config& cfg) {
    return transform_instance(instance, gls_neuron(cfg));
}

/// Firing-time series of an instance (the feature used for causality tests).
inline std::vector<double> firing_time_series(std::span<const double> instance, const gls_neuron& neuron) {
    std::vector<double> out(instance.size());
    for (std::size_t i = 0; i < instance.size(); ++i)
        out[i] = static_cast<double>(neuron.firing_time(instance[i]));
    return out;
}

} // namespace ncl

#endif // NCL_CHAOSFEX_HPP
