#ifndef NCL_HARNESS_DATASET_HPP
#define NCL_HARNESS_DATASET_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "ncl/chaosnet.hpp"
#include "ncl/dynamics.hpp"
#include "ncl/error.hpp"
#include "ncl/harness/parallel.hpp"

namespace ncl {

enum class system_kind { ar, tent, logistic };

inline std::string to_string(system_kind k) {
    switch (k) {
    case system_kind::ar: return "ar";
    case system_kind::tent: return "tent";
    case system_kind::logistic: return "logistic";
    }
    return "?";
}

inline system_kind parse_system(const std::string& s) {
    if (s == "ar") return system_kind::ar;
    if (s == "tent") return system_kind::tent;
    if (s == "logistic") return system_kind::logistic;
    throw config_error("unknown system '" + s + "' (expected ar, tent or logistic)");
}

/// A coupled generator with every parameter except eta and the seed.
struct system_spec {
    system_kind kind = system_kind::tent;
    double b1 = 0.65, b2 = 0.47;  // tent
    double A1 = 4.0, A2 = 3.82;   // logistic
    double a1 = 0.8, a2 = 0.9, gamma = 0.03; // ar
    std::size_t length = 2000;
    std::size_t transient = 500;

    static system_spec tent(double b1, double b2) {
        system_spec s;
        s.kind = system_kind::tent;
        s.b1 = b1;
        s.b2 = b2;
        return s;
    }
    static system_spec logistic(double A1, double A2) {
        system_spec s;
        s.kind = system_kind::logistic;
        s.A1 = A1;
        s.A2 = A2;
        return s;
    }
    static system_spec ar() {
        system_spec s;
        s.kind = system_kind::ar;
        return s;
    }
};

inline time_series_pair generate_trial(const system_spec& sys, double eta, std::uint64_t seed) {
    if (sys.kind == system_kind::ar) {
        coupled_ar_config c;
        c.a1 = sys.a1;
        c.a2 = sys.a2;
        c.gamma = sys.gamma;
        c.eta = eta;
        c.length = sys.length;
        c.transient = sys.transient;
        c.seed = seed;
        return generate_coupled_ar_pair(c);
    }
    coupled_map_config c;
    if (sys.kind == system_kind::tent) {
        c.master_map = skew_tent_params{sys.b1};
        c.slave_map = skew_tent_params{sys.b2};
    } else {
        c.master_map = logistic_params{sys.A1};
        c.slave_map = logistic_params{sys.A2};
    }
    c.eta = eta;
    c.length = sys.length;
    c.transient = sys.transient;
    c.seed = seed;
    return generate_coupled_map_pair(c);
}

/// Trial i uses seed derive_seed(base_seed, i), so trials are independent of
/// how many are generated and of execution order.
inline std::vector<time_series_pair> generate_trials(const system_spec& sys, double eta, std::size_t count,
                                                     std::uint64_t base_seed) {
    std::vector<time_series_pair> out(count);
    parallel_for(count, [&](std::size_t i) { out[i] = generate_trial(sys, eta, derive_seed(base_seed, i)); });
    return out;
}

/// Per-class train/test counts. Defaults reproduce the 1000-trial split
/// 801/199 (cause) and 799/201 (effect).
struct split_counts {
    std::size_t train0 = 801, test0 = 199;
    std::size_t train1 = 799, test1 = 201;

    std::size_t trials() const { return train0 + test0; }

    /// Same proportions for a smaller trial count.
    static split_counts scaled(std::size_t trials) {
        split_counts c;
        c.train0 = static_cast<std::size_t>(std::lround(0.801 * static_cast<double>(trials)));
        c.train1 = static_cast<std::size_t>(std::lround(0.799 * static_cast<double>(trials)));
        c.test0 = trials - c.train0;
        c.test1 = trials - c.train1;
        return c;
    }
};

struct dataset_split {
    labeled_set train;
    labeled_set test;
    /// Instance ids as 2*trial + class, for partition checks.
    std::vector<std::size_t> train_ids, test_ids;
};

/**
 * Each trial contributes its master (class 0) and slave (class 1). Class
 * members are shuffled with the seed and the first train_k go to training.
 */
inline dataset_split split_train_test(const std::vector<time_series_pair>& trials, std::uint64_t seed,
                                      const split_counts& counts = {}) {
    if (trials.size() != counts.train0 + counts.test0 || trials.size() != counts.train1 + counts.test1)
        throw config_error("split_train_test: " + std::to_string(trials.size()) +
                           " trials do not match the requested per-class counts");
    std::mt19937_64 rng(seed);
    dataset_split out;
    for (int cls = 0; cls < 2; ++cls) {
        std::vector<std::size_t> order(trials.size());
        std::iota(order.begin(), order.end(), 0);
        std::shuffle(order.begin(), order.end(), rng);
        const std::size_t n_train = cls == 0 ? counts.train0 : counts.train1;
        for (std::size_t k = 0; k < order.size(); ++k) {
            const auto& p = trials[order[k]];
            const auto& x = cls == 0 ? p.master : p.slave;
            const std::size_t id = 2 * order[k] + static_cast<std::size_t>(cls);
            if (k < n_train) {
                out.train.push_back(x, cls);
                out.train_ids.push_back(id);
            } else {
                out.test.push_back(x, cls);
                out.test_ids.push_back(id);
            }
        }
    }
    return out;
}

/// Master as class 0 and slave as class 1 for every trial, in trial order.
inline labeled_set as_labeled(const std::vector<time_series_pair>& trials) {
    labeled_set out;
    for (const auto& p : trials) {
        out.push_back(p.master, 0);
        out.push_back(p.slave, 1);
    }
    return out;
}

} // namespace ncl

#endif // NCL_HARNESS_DATASET_HPP
