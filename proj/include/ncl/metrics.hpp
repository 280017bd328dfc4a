#ifndef NCL_METRICS_HPP
#define NCL_METRICS_HPP

#include <cstddef>
#include <span>
#include <vector>

#include "ncl/error.hpp"

namespace ncl {

struct evaluation_report {
    double macro_f1 = 0.0;
    std::vector<double> precision;
    std::vector<double> recall;
    std::vector<double> f1;
    /// confusion[true][predicted]
    std::vector<std::vector<std::size_t>> confusion;
};

/// Per-class precision/recall/F1 and their unweighted mean. A class whose
/// precision and recall are both zero (or undefined) has F1 = 0.
inline evaluation_report evaluate_predictions(std::span<const int> truth, std::span<const int> predicted,
                                              int class_count) {
    if (truth.size() != predicted.size()) throw dimension_error("evaluate_predictions: size mismatch");
    if (truth.empty()) throw config_error("evaluate_predictions: empty label set");
    const auto z = static_cast<std::size_t>(class_count);
    evaluation_report r;
    r.confusion.assign(z, std::vector<std::size_t>(z, 0));
    for (std::size_t i = 0; i < truth.size(); ++i) {
        if (truth[i] < 0 || predicted[i] < 0 || static_cast<std::size_t>(truth[i]) >= z ||
            static_cast<std::size_t>(predicted[i]) >= z)
            throw config_error("evaluate_predictions: label out of range");
        ++r.confusion[static_cast<std::size_t>(truth[i])][static_cast<std::size_t>(predicted[i])];
    }
    double sum = 0.0;
    for (std::size_t k = 0; k < z; ++k) {
        std::size_t tp = r.confusion[k][k], pred_k = 0, true_k = 0;
        for (std::size_t j = 0; j < z; ++j) {
            pred_k += r.confusion[j][k];
            true_k += r.confusion[k][j];
        }
        const double p = pred_k ? static_cast<double>(tp) / static_cast<double>(pred_k) : 0.0;
        const double rc = true_k ? static_cast<double>(tp) / static_cast<double>(true_k) : 0.0;
        const double f = (p + rc) > 0.0 ? 2.0 * p * rc / (p + rc) : 0.0;
        r.precision.push_back(p);
        r.recall.push_back(rc);
        r.f1.push_back(f);
        sum += f;
    }
    r.macro_f1 = sum / static_cast<double>(z);
    return r;
}

} // namespace ncl

#endif // NCL_METRICS_HPP
