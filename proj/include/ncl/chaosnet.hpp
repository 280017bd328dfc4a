#ifndef NCL_CHAOSNET_HPP
#define NCL_CHAOSNET_HPP

/** @file
 * ChaosNet: a prototype classifier over ChaosFEX features.
 *
 * Each class is represented by the elementwise mean of the flattened feature
 * matrices of its training instances. A test instance is assigned the class
 * whose prototype has the largest cosine similarity with its features.
 */

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "ncl/chaosfex.hpp"
#include "ncl/error.hpp"
#include "ncl/metrics.hpp"

namespace ncl {

/// Instances with integer class labels 0..Z-1.
struct labeled_set {
    std::vector<std::vector<double>> instances;
    std::vector<int> labels;

    std::size_t size() const { return instances.size(); }
    bool empty() const { return instances.empty(); }

    void push_back(std::vector<double> x, int label) {
        instances.push_back(std::move(x));
        labels.push_back(label);
    }

    int class_count() const {
        return labels.empty() ? 0 : *std::max_element(labels.begin(), labels.end()) + 1;
    }

    labeled_set subset(std::span<const std::size_t> idx) const {
        labeled_set out;
        out.instances.reserve(idx.size());
        out.labels.reserve(idx.size());
        for (auto i : idx) out.push_back(instances[i], labels[i]);
        return out;
    }
};

enum class normalization_mode {
    /// Each instance is min-max scaled by its own range.
    per_instance,
    /// Every instance is scaled by the global range of the training set.
    training_range,
};

struct normalization {
    normalization_mode mode = normalization_mode::per_instance;
    double lo = 0.0;
    double hi = 1.0;

    std::vector<double> apply(std::span<const double> x) const {
        if (mode == normalization_mode::training_range) return normalize_series(x, lo, hi);
        if (x.empty()) return {};
        const auto [mn, mx] = std::minmax_element(x.begin(), x.end());
        if (!(*mx > *mn)) throw config_error("per-instance normalization: constant instance");
        return normalize_series(x, *mn, *mx);
    }
};

/// In training_range mode, the global min and max over every training value.
inline normalization fit_normalization(const labeled_set& data,
                                       normalization_mode mode = normalization_mode::per_instance) {
    normalization n;
    n.mode = mode;
    if (mode == normalization_mode::per_instance) return n;
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (const auto& x : data.instances)
        for (double v : x) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    if (!(hi > lo)) throw config_error("fit_normalization: training data has zero range");
    n.lo = lo;
    n.hi = hi;
    return n;
}

/// u.v / (|u| |v|); 0 when either norm vanishes.
inline double cosine_similarity(std::span<const double> u, std::span<const double> v) {
    if (u.size() != v.size()) throw dimension_error("cosine_similarity: length mismatch");
    double dot = 0.0, uu = 0.0, vv = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        dot += u[i] * v[i];
        uu += u[i] * u[i];
        vv += v[i] * v[i];
    }
    if (uu == 0.0 || vv == 0.0) return 0.0;
    return std::clamp(dot / (std::sqrt(uu) * std::sqrt(vv)), -1.0, 1.0);
}

struct class_prototype {
    int label = 0;
    std::vector<double> mean_vector;
};

struct chaosnet_model {
    std::vector<class_prototype> prototypes;
    neurochaos_config config;
    normalization norm;

    std::size_t instance_length() const {
        return prototypes.empty() ? 0 : prototypes.front().mean_vector.size() / features_per_stimulus;
    }
};

/// Flattened ChaosFEX features of every instance after normalization.
inline std::vector<std::vector<double>> chaosfex_features(const labeled_set& data, const gls_neuron& neuron,
                                                          const normalization& norm) {
    std::vector<std::vector<double>> out;
    out.reserve(data.size());
    for (const auto& x : data.instances) out.push_back(transform_instance(norm.apply(x), neuron).flatten());
    return out;
}

/// Class prototypes from precomputed flattened features.
inline std::vector<class_prototype> mean_prototypes(std::span<const std::vector<double>> features,
                                                    std::span<const int> labels, int class_count) {
    if (features.empty()) throw config_error("mean_prototypes: no training instances");
    const std::size_t dim = features.front().size();
    std::vector<class_prototype> protos(static_cast<std::size_t>(class_count));
    std::vector<std::size_t> counts(protos.size(), 0);
    for (std::size_t k = 0; k < protos.size(); ++k) {
        protos[k].label = static_cast<int>(k);
        protos[k].mean_vector.assign(dim, 0.0);
    }
    for (std::size_t i = 0; i < features.size(); ++i) {
        if (features[i].size() != dim) throw dimension_error("mean_prototypes: unequal instance lengths");
        const auto k = static_cast<std::size_t>(labels[i]);
        auto& acc = protos[k].mean_vector;
        for (std::size_t j = 0; j < dim; ++j) acc[j] += features[i][j];
        ++counts[k];
    }
    for (std::size_t k = 0; k < protos.size(); ++k) {
        if (counts[k] == 0)
            throw config_error("chaosnet fit: class " + std::to_string(k) + " has no training instances");
        for (double& v : protos[k].mean_vector) v /= static_cast<double>(counts[k]);
    }
    return protos;
}

/// Argmax of cosine similarity; ties go to the smallest class index.
inline int predict_features(std::span<const class_prototype> prototypes, std::span<const double> features) {
    int best = -1;
    double best_sim = -std::numeric_limits<double>::infinity();
    for (const auto& p : prototypes) {
        if (p.mean_vector.size() != features.size())
            throw dimension_error("predict: feature dimension does not match prototypes");
        const double sim = cosine_similarity(features, p.mean_vector);
        if (sim > best_sim) {
            best_sim = sim;
            best = p.label;
        }
    }
    return best;
}

inline chaosnet_model fit(const labeled_set& train, const neurochaos_config& cfg,
                          normalization_mode mode = normalization_mode::per_instance) {
    validate(cfg);
    if (train.empty()) throw config_error("chaosnet fit: empty training set");
    const int z = train.class_count();
    if (z < 2) throw config_error("chaosnet fit: need at least two classes");
    chaosnet_model model;
    model.config = cfg;
    model.norm = fit_normalization(train, mode);
    const gls_neuron neuron(cfg);
    const auto feats = chaosfex_features(train, neuron, model.norm);
    model.prototypes = mean_prototypes(feats, train.labels, z);
    return model;
}

inline int predict(const chaosnet_model& model, std::span<const double> instance, const gls_neuron& neuron) {
    if (instance.size() != model.instance_length())
        throw dimension_error("predict: instance length " + std::to_string(instance.size()) +
                              " does not match model length " + std::to_string(model.instance_length()));
    return predict_features(model.prototypes, transform_instance(model.norm.apply(instance), neuron).flatten());
}

inline int predict(const chaosnet_model& model, std::span<const double> instance) {
    return predict(model, instance, gls_neuron(model.config));
}

inline std::vector<int> predict_all(const chaosnet_model& model, const labeled_set& data) {
    const gls_neuron neuron(model.config);
    std::vector<int> out;
    out.reserve(data.size());
    for (const auto& x : data.instances) out.push_back(predict(model, x, neuron));
    return out;
}

inline evaluation_report evaluate(const chaosnet_model& model, const labeled_set& test) {
    if (test.empty()) throw config_error("evaluate: empty test set");
    const int z = std::max(test.class_count(), static_cast<int>(model.prototypes.size()));
    return evaluate_predictions(test.labels, predict_all(model, test), z);
}

/// Five contiguous stratified folds taken from a seeded per-class shuffle.
inline std::vector<std::vector<std::size_t>> stratified_folds(std::span<const int> labels, std::size_t k,
                                                              std::uint64_t seed) {
    if (k < 2) throw config_error("stratified_folds: need at least two folds");
    const int z = labels.empty() ? 0 : *std::max_element(labels.begin(), labels.end()) + 1;
    std::vector<std::vector<std::size_t>> by_class(static_cast<std::size_t>(z));
    for (std::size_t i = 0; i < labels.size(); ++i) by_class[static_cast<std::size_t>(labels[i])].push_back(i);

    std::mt19937_64 rng(seed);
    std::vector<std::vector<std::size_t>> folds(k);
    for (std::size_t c = 0; c < by_class.size(); ++c) {
        auto& idx = by_class[c];
        if (idx.size() < k)
            throw config_error("stratified_folds: class " + std::to_string(c) + " has fewer than " +
                               std::to_string(k) + " instances");
        std::shuffle(idx.begin(), idx.end(), rng);
        for (std::size_t f = 0; f < k; ++f) {
            const std::size_t begin = f * idx.size() / k;
            const std::size_t end = (f + 1) * idx.size() / k;
            folds[f].insert(folds[f].end(), idx.begin() + static_cast<std::ptrdiff_t>(begin),
                            idx.begin() + static_cast<std::ptrdiff_t>(end));
        }
    }
    for (auto& f : folds) std::sort(f.begin(), f.end());
    return folds;
}

struct q_score {
    double q = 0.0;
    double mean_macro_f1 = 0.0;
    std::vector<double> fold_macro_f1;
};

struct q_search_result {
    double best_q = 0.0;
    double best_score = 0.0;
    /// Every grid value that attains best_score, ascending.
    std::vector<double> maximizers;
    std::vector<q_score> table;
};

/// Grid q = start, start+step, ... up to and including stop (within rounding).
inline std::vector<double> q_grid(double start = 0.01, double stop = 0.98, double step = 0.01) {
    std::vector<double> grid;
    const auto n = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
    for (std::size_t i = 0; i < n; ++i) grid.push_back(std::round((start + step * static_cast<double>(i)) * 1e9) / 1e9);
    return grid;
}

/**
 * Five-fold cross-validated search over q with b and epsilon fixed.
 *
 * Normalization is fitted once on the whole training set. Scores equal to
 * the best within 1e-12 count as maximizers; the smallest is selected.
 */
inline q_search_result tune_q(const labeled_set& train, double b, double epsilon, std::span<const double> grid,
                              std::uint64_t seed = 0, std::size_t folds_k = 5, std::size_t max_iter = 10000,
                              normalization_mode mode = normalization_mode::per_instance) {
    if (grid.empty()) throw config_error("tune_q: empty q grid");
    const auto folds = stratified_folds(train.labels, folds_k, seed);
    const auto norm = fit_normalization(train, mode);
    const int z = train.class_count();

    std::vector<std::vector<double>> scaled;
    scaled.reserve(train.size());
    for (const auto& x : train.instances) scaled.push_back(norm.apply(x));

    std::vector<int> fold_of(train.size(), 0);
    for (std::size_t f = 0; f < folds.size(); ++f)
        for (auto i : folds[f]) fold_of[i] = static_cast<int>(f);

    q_search_result result;
    for (double q : grid) {
        const gls_neuron neuron({q, b, epsilon, max_iter});
        std::vector<std::vector<double>> feats;
        feats.reserve(train.size());
        for (const auto& x : scaled) feats.push_back(transform_instance(x, neuron).flatten());

        // Per-fold class sums; the training prototype of fold f is the total minus fold f.
        const std::size_t dim = feats.front().size();
        std::vector<std::vector<std::vector<double>>> sums(
            folds.size(), std::vector<std::vector<double>>(static_cast<std::size_t>(z), std::vector<double>(dim, 0.0)));
        std::vector<std::vector<std::size_t>> counts(folds.size(), std::vector<std::size_t>(static_cast<std::size_t>(z), 0));
        for (std::size_t i = 0; i < train.size(); ++i) {
            const auto f = static_cast<std::size_t>(fold_of[i]);
            const auto k = static_cast<std::size_t>(train.labels[i]);
            auto& acc = sums[f][k];
            for (std::size_t j = 0; j < dim; ++j) acc[j] += feats[i][j];
            ++counts[f][k];
        }

        q_score row{q, 0.0, {}};
        for (std::size_t f = 0; f < folds.size(); ++f) {
            std::vector<class_prototype> protos(static_cast<std::size_t>(z));
            for (std::size_t k = 0; k < protos.size(); ++k) {
                protos[k].label = static_cast<int>(k);
                protos[k].mean_vector.assign(dim, 0.0);
                std::size_t n = 0;
                for (std::size_t g = 0; g < folds.size(); ++g) {
                    if (g == f) continue;
                    for (std::size_t j = 0; j < dim; ++j) protos[k].mean_vector[j] += sums[g][k][j];
                    n += counts[g][k];
                }
                for (double& v : protos[k].mean_vector) v /= static_cast<double>(n);
            }
            std::vector<int> truth, pred;
            for (auto i : folds[f]) {
                truth.push_back(train.labels[i]);
                pred.push_back(predict_features(protos, feats[i]));
            }
            row.fold_macro_f1.push_back(evaluate_predictions(truth, pred, z).macro_f1);
        }
        row.mean_macro_f1 = std::accumulate(row.fold_macro_f1.begin(), row.fold_macro_f1.end(), 0.0) /
                            static_cast<double>(row.fold_macro_f1.size());
        result.table.push_back(std::move(row));
    }

    result.best_score = -1.0;
    for (const auto& r : result.table) result.best_score = std::max(result.best_score, r.mean_macro_f1);
    for (const auto& r : result.table)
        if (r.mean_macro_f1 >= result.best_score - 1e-12) result.maximizers.push_back(r.q);
    std::sort(result.maximizers.begin(), result.maximizers.end());
    result.best_q = result.maximizers.front();
    return result;
}

} // namespace ncl

#endif // NCL_CHAOSNET_HPP
