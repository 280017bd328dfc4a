#ifndef NCL_MLP_HPP
#define NCL_MLP_HPP

/** @file
 * Dense feed-forward baseline: Glorot-uniform initialisation, softmax
 * cross-entropy, mini-batch Adam. Scalar is float for the full-size network
 * and double where gradients are checked against finite differences.
 */

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <functional>
#include <numeric>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ncl/error.hpp"

namespace ncl {

enum class activation : std::uint8_t { sigmoid = 0, relu = 1, softmax = 2, identity = 3 };

inline std::string to_string(activation a) {
    switch (a) {
    case activation::sigmoid: return "sigmoid";
    case activation::relu: return "relu";
    case activation::softmax: return "softmax";
    case activation::identity: return "identity";
    }
    return "?";
}

struct mlp_architecture {
    /// Layer widths, input first.
    std::vector<std::size_t> layers;
    /// activations[i] maps the pre-activation of layers[i + 1].
    std::vector<activation> activations;

    /// 2000 -> 5000 (sigmoid) -> 500 -> 100 -> 30 (relu) -> 2 (softmax).
    static mlp_architecture baseline(std::size_t input = 2000, std::size_t classes = 2) {
        return {{input, 5000, 500, 100, 30, classes},
                {activation::sigmoid, activation::relu, activation::relu, activation::relu, activation::softmax}};
    }

    std::size_t depth() const { return activations.size(); }
    std::size_t input_size() const { return layers.front(); }
    std::size_t output_size() const { return layers.back(); }
};

inline void validate(const mlp_architecture& a) {
    detail::require(a.layers.size() >= 2, "mlp: need at least an input and an output layer");
    detail::require(a.activations.size() + 1 == a.layers.size(), "mlp: one activation per non-input layer");
    for (auto w : a.layers) detail::require(w >= 1, "mlp: layer widths must be positive");
    detail::require(a.activations.back() == activation::softmax, "mlp: output layer must be softmax");
    for (std::size_t i = 0; i + 1 < a.activations.size(); ++i)
        detail::require(a.activations[i] != activation::softmax, "mlp: softmax is only allowed on the output layer");
}

struct training_config {
    std::size_t epochs = 30;
    std::size_t batch_size = 32;
    double learning_rate = 1e-4;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double adam_epsilon = 1e-7;
    std::uint64_t seed = 0;
};

inline void validate(const training_config& c) {
    detail::require(c.epochs >= 1, "mlp training: epochs must be >= 1");
    detail::require(c.batch_size >= 1, "mlp training: batch size must be >= 1");
    detail::require(c.learning_rate >= 0.0, "mlp training: learning rate must be >= 0");
}

template <class Scalar>
struct mlp_model {
    using matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    using vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

    mlp_architecture arch;
    std::vector<matrix> weights; // weights[i] is layers[i+1] x layers[i]
    std::vector<vector> biases;

    mlp_model() = default;

    /// Glorot-uniform weights, zero biases.
    mlp_model(mlp_architecture a, std::uint64_t seed) : arch(std::move(a)) {
        validate(arch);
        std::mt19937_64 rng(seed);
        for (std::size_t i = 0; i < arch.depth(); ++i) {
            const auto fan_in = static_cast<Eigen::Index>(arch.layers[i]);
            const auto fan_out = static_cast<Eigen::Index>(arch.layers[i + 1]);
            const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
            std::uniform_real_distribution<double> u(-limit, limit);
            matrix w(fan_out, fan_in);
            for (Eigen::Index c = 0; c < w.cols(); ++c)
                for (Eigen::Index r = 0; r < w.rows(); ++r) w(r, c) = static_cast<Scalar>(u(rng));
            weights.push_back(std::move(w));
            biases.push_back(vector::Zero(fan_out));
        }
    }

    std::size_t parameter_count() const {
        std::size_t n = 0;
        for (std::size_t i = 0; i < weights.size(); ++i)
            n += static_cast<std::size_t>(weights[i].size() + biases[i].size());
        return n;
    }
};

/// Gradients with the same layout as the model parameters.
template <class Scalar>
struct mlp_gradients {
    std::vector<typename mlp_model<Scalar>::matrix> weights;
    std::vector<typename mlp_model<Scalar>::vector> biases;
};

namespace detail {

template <class M>
void apply_activation(M& z, activation a) {
    using S = typename M::Scalar;
    switch (a) {
    case activation::sigmoid:
        z = z.unaryExpr([](S v) { return S(1) / (S(1) + std::exp(-v)); });
        break;
    case activation::relu:
        z = z.cwiseMax(S(0));
        break;
    case activation::softmax:
        for (Eigen::Index c = 0; c < z.cols(); ++c) {
            auto col = z.col(c);
            const S mx = col.maxCoeff();
            col = (col.array() - mx).exp().matrix();
            col /= col.sum();
        }
        break;
    case activation::identity:
        break;
    }
}

} // namespace detail

/// Per-layer outputs for a batch whose columns are instances; [0] is the input.
template <class Scalar>
std::vector<typename mlp_model<Scalar>::matrix> forward_batch(const mlp_model<Scalar>& model,
                                                              const typename mlp_model<Scalar>::matrix& inputs) {
    if (static_cast<std::size_t>(inputs.rows()) != model.arch.input_size())
        throw dimension_error("mlp forward: input has " + std::to_string(inputs.rows()) + " rows, expected " +
                              std::to_string(model.arch.input_size()));
    std::vector<typename mlp_model<Scalar>::matrix> acts;
    acts.reserve(model.arch.depth() + 1);
    acts.push_back(inputs);
    for (std::size_t i = 0; i < model.arch.depth(); ++i) {
        typename mlp_model<Scalar>::matrix z = model.weights[i] * acts.back();
        z.colwise() += model.biases[i];
        detail::apply_activation(z, model.arch.activations[i]);
        acts.push_back(std::move(z));
    }
    return acts;
}

template <class Scalar>
struct forward_result {
    std::vector<double> probabilities;
    /// Outputs of every layer, input first.
    std::vector<std::vector<double>> activations;
};

template <class Scalar>
forward_result<Scalar> forward(const mlp_model<Scalar>& model, std::span<const double> instance) {
    typename mlp_model<Scalar>::matrix x(static_cast<Eigen::Index>(instance.size()), 1);
    for (std::size_t i = 0; i < instance.size(); ++i) x(static_cast<Eigen::Index>(i), 0) = static_cast<Scalar>(instance[i]);
    const auto acts = forward_batch(model, x);
    forward_result<Scalar> out;
    for (const auto& a : acts) {
        std::vector<double> v(static_cast<std::size_t>(a.rows()));
        for (Eigen::Index r = 0; r < a.rows(); ++r) v[static_cast<std::size_t>(r)] = static_cast<double>(a(r, 0));
        out.activations.push_back(std::move(v));
    }
    out.probabilities = out.activations.back();
    return out;
}

/// Output of hidden layer `layer_index` (1-based; the output layer is depth()).
template <class Scalar>
std::vector<double> hidden_activations(const mlp_model<Scalar>& model, std::span<const double> instance,
                                       std::size_t layer_index = 4) {
    if (layer_index < 1 || layer_index >= model.arch.layers.size() - 1)
        throw config_error("hidden_activations: layer index " + std::to_string(layer_index) +
                           " is not a hidden layer");
    return forward(model, instance).activations[layer_index];
}

/// Mean cross-entropy of a batch given the softmax outputs.
template <class M>
double cross_entropy(const M& probs, std::span<const int> labels) {
    double loss = 0.0;
    for (Eigen::Index c = 0; c < probs.cols(); ++c) {
        const double p = static_cast<double>(probs(labels[static_cast<std::size_t>(c)], c));
        loss -= std::log(std::max(p, 1e-300));
    }
    return loss / static_cast<double>(probs.cols());
}

/// Gradient of the mean cross-entropy of the batch with respect to every parameter.
template <class Scalar>
mlp_gradients<Scalar> backward(const mlp_model<Scalar>& model,
                               const std::vector<typename mlp_model<Scalar>::matrix>& acts,
                               std::span<const int> labels) {
    using matrix = typename mlp_model<Scalar>::matrix;
    const auto batch = acts.front().cols();
    const std::size_t depth = model.arch.depth();
    mlp_gradients<Scalar> g;
    g.weights.resize(depth);
    g.biases.resize(depth);

    // Softmax + cross-entropy: dL/dz = p - onehot.
    matrix delta = acts.back();
    for (Eigen::Index c = 0; c < batch; ++c) delta(labels[static_cast<std::size_t>(c)], c) -= Scalar(1);
    delta /= static_cast<Scalar>(batch);

    for (std::size_t i = depth; i-- > 0;) {
        g.weights[i].noalias() = delta * acts[i].transpose();
        g.biases[i] = delta.rowwise().sum();
        if (i == 0) break;
        matrix upstream = model.weights[i].transpose() * delta;
        const auto& a = acts[i];
        switch (model.arch.activations[i - 1]) {
        case activation::sigmoid:
            upstream.array() *= a.array() * (Scalar(1) - a.array());
            break;
        case activation::relu:
            upstream.array() *= (a.array() > Scalar(0)).template cast<Scalar>();
            break;
        case activation::identity:
            break;
        case activation::softmax:
            throw config_error("mlp backward: softmax on a hidden layer");
        }
        delta = std::move(upstream);
    }
    return g;
}

template <class Scalar>
typename mlp_model<Scalar>::matrix batch_matrix(std::span<const std::vector<double>> instances,
                                                std::span<const std::size_t> idx, std::size_t input_size) {
    typename mlp_model<Scalar>::matrix x(static_cast<Eigen::Index>(input_size), static_cast<Eigen::Index>(idx.size()));
    for (std::size_t c = 0; c < idx.size(); ++c) {
        const auto& v = instances[idx[c]];
        if (v.size() != input_size) throw dimension_error("mlp: instance length does not match input layer");
        for (std::size_t r = 0; r < input_size; ++r)
            x(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = static_cast<Scalar>(v[r]);
    }
    return x;
}

struct training_history {
    /// Mean training cross-entropy per epoch.
    std::vector<double> epoch_loss;
};

/// Mini-batch Adam on softmax cross-entropy; deterministic given cfg.seed.
template <class Scalar>
training_history train(mlp_model<Scalar>& model, std::span<const std::vector<double>> instances,
                       std::span<const int> labels, const training_config& cfg) {
    using matrix = typename mlp_model<Scalar>::matrix;
    using vector = typename mlp_model<Scalar>::vector;
    validate(cfg);
    if (instances.empty()) throw config_error("mlp train: empty training set");
    if (instances.size() != labels.size()) throw dimension_error("mlp train: instances and labels differ in count");
    for (int l : labels)
        if (l < 0 || static_cast<std::size_t>(l) >= model.arch.output_size())
            throw config_error("mlp train: label outside the output layer");

    const std::size_t depth = model.arch.depth();
    std::vector<matrix> mw(depth), vw(depth);
    std::vector<vector> mb(depth), vb(depth);
    for (std::size_t i = 0; i < depth; ++i) {
        mw[i] = matrix::Zero(model.weights[i].rows(), model.weights[i].cols());
        vw[i] = mw[i];
        mb[i] = vector::Zero(model.biases[i].size());
        vb[i] = mb[i];
    }

    std::mt19937_64 rng(cfg.seed);
    std::vector<std::size_t> order(instances.size());
    std::iota(order.begin(), order.end(), 0);
    training_history history;
    std::size_t step = 0;
    const auto b1 = static_cast<Scalar>(cfg.beta1);
    const auto b2 = static_cast<Scalar>(cfg.beta2);
    const auto eps = static_cast<Scalar>(cfg.adam_epsilon);

    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        double epoch_loss = 0.0;
        for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
            const std::size_t end = std::min(order.size(), start + cfg.batch_size);
            const std::span<const std::size_t> idx(order.data() + start, end - start);
            std::vector<int> batch_labels;
            for (auto i : idx) batch_labels.push_back(labels[i]);

            const auto acts = forward_batch(model, batch_matrix<Scalar>(instances, idx, model.arch.input_size()));
            const double loss = cross_entropy(acts.back(), batch_labels);
            if (!std::isfinite(loss))
                throw divergence_error("mlp train: non-finite loss at epoch " + std::to_string(epoch) + ", batch " +
                                       std::to_string(start / cfg.batch_size));
            epoch_loss += loss * static_cast<double>(idx.size());

            const auto g = backward(model, acts, batch_labels);
            ++step;
            const double bias1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(step));
            const double bias2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(step));
            const auto lr_t = static_cast<Scalar>(cfg.learning_rate * std::sqrt(bias2) / bias1);
            if (cfg.learning_rate == 0.0) continue;
            for (std::size_t i = 0; i < depth; ++i) {
                mw[i] = b1 * mw[i] + (Scalar(1) - b1) * g.weights[i];
                vw[i] = b2 * vw[i] + (Scalar(1) - b2) * g.weights[i].cwiseAbs2();
                model.weights[i].array() -= lr_t * mw[i].array() / (vw[i].array().sqrt() + eps);
                mb[i] = b1 * mb[i] + (Scalar(1) - b1) * g.biases[i];
                vb[i] = b2 * vb[i] + (Scalar(1) - b2) * g.biases[i].cwiseAbs2();
                model.biases[i].array() -= lr_t * mb[i].array() / (vb[i].array().sqrt() + eps);
            }
        }
        history.epoch_loss.push_back(epoch_loss / static_cast<double>(instances.size()));
    }
    return history;
}

template <class Scalar>
std::vector<int> predict_all(const mlp_model<Scalar>& model, std::span<const std::vector<double>> instances,
                             std::size_t chunk = 64) {
    std::vector<int> out;
    out.reserve(instances.size());
    std::vector<std::size_t> idx;
    for (std::size_t start = 0; start < instances.size(); start += chunk) {
        idx.clear();
        for (std::size_t i = start; i < std::min(instances.size(), start + chunk); ++i) idx.push_back(i);
        const auto acts = forward_batch(model, batch_matrix<Scalar>(instances, idx, model.arch.input_size()));
        const auto& p = acts.back();
        for (Eigen::Index c = 0; c < p.cols(); ++c) {
            Eigen::Index arg = 0;
            p.col(c).maxCoeff(&arg); // first maximum on ties
            out.push_back(static_cast<int>(arg));
        }
    }
    return out;
}

/**
 * Largest relative error between backpropagated gradients and central
 * finite differences of the loss on one labelled instance. Relative error
 * is |g - fd| / max(|g| + |fd|, floor). `tamper` may modify the analytic
 * gradients before comparison.
 */
template <class Scalar>
double gradient_check(const mlp_model<Scalar>& model, std::span<const double> instance, int label, double h = 1e-5,
                      const std::function<void(mlp_gradients<Scalar>&)>& tamper = {}, double floor = 1e-8) {
    using matrix = typename mlp_model<Scalar>::matrix;
    matrix x(static_cast<Eigen::Index>(instance.size()), 1);
    for (std::size_t i = 0; i < instance.size(); ++i) x(static_cast<Eigen::Index>(i), 0) = static_cast<Scalar>(instance[i]);
    const int labels_arr[1] = {label};
    const std::span<const int> labels(labels_arr, 1);

    auto g = backward(model, forward_batch(model, x), labels);
    if (tamper) tamper(g);

    mlp_model<Scalar> probe = model;
    auto loss_at = [&]() { return cross_entropy(forward_batch(probe, x).back(), labels); };
    double worst = 0.0;
    auto compare = [&](Scalar& param, Scalar analytic) {
        const Scalar saved = param;
        param = saved + static_cast<Scalar>(h);
        const double up = loss_at();
        param = saved - static_cast<Scalar>(h);
        const double down = loss_at();
        param = saved;
        const double fd = (up - down) / (2.0 * h);
        const double a = static_cast<double>(analytic);
        const double rel = std::abs(a - fd) / std::max(std::abs(a) + std::abs(fd), floor);
        worst = std::max(worst, rel);
    };
    for (std::size_t i = 0; i < probe.weights.size(); ++i) {
        for (Eigen::Index c = 0; c < probe.weights[i].cols(); ++c)
            for (Eigen::Index r = 0; r < probe.weights[i].rows(); ++r) compare(probe.weights[i](r, c), g.weights[i](r, c));
        for (Eigen::Index r = 0; r < probe.biases[i].size(); ++r) compare(probe.biases[i](r), g.biases[i](r));
    }
    return worst;
}

namespace detail {

inline constexpr char mlp_magic[8] = {'N', 'C', 'L', 'M', 'L', 'P', '0', '1'};

template <class T>
void write_pod(std::ostream& os, const T& v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T read_pod(std::istream& is) {
    T v{};
    is.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!is) throw io_error("mlp load: truncated file");
    return v;
}

} // namespace detail

/// Binary blob: magic, scalar width, layer widths, activations, then each
/// layer's weights (column-major) followed by its biases.
template <class Scalar>
void save(const mlp_model<Scalar>& model, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw io_error("mlp save: cannot open " + path);
    os.write(detail::mlp_magic, sizeof detail::mlp_magic);
    detail::write_pod<std::uint32_t>(os, sizeof(Scalar));
    detail::write_pod<std::uint32_t>(os, static_cast<std::uint32_t>(model.arch.layers.size()));
    for (auto w : model.arch.layers) detail::write_pod<std::uint64_t>(os, w);
    for (auto a : model.arch.activations) detail::write_pod<std::uint8_t>(os, static_cast<std::uint8_t>(a));
    for (std::size_t i = 0; i < model.weights.size(); ++i) {
        os.write(reinterpret_cast<const char*>(model.weights[i].data()),
                 static_cast<std::streamsize>(sizeof(Scalar) * static_cast<std::size_t>(model.weights[i].size())));
        os.write(reinterpret_cast<const char*>(model.biases[i].data()),
                 static_cast<std::streamsize>(sizeof(Scalar) * static_cast<std::size_t>(model.biases[i].size())));
    }
    if (!os) throw io_error("mlp save: write failed for " + path);
}

template <class Scalar>
mlp_model<Scalar> load_mlp(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw io_error("mlp load: cannot open " + path);
    char magic[8];
    is.read(magic, sizeof magic);
    if (!is || std::memcmp(magic, detail::mlp_magic, sizeof magic) != 0) throw io_error("mlp load: bad magic in " + path);
    if (detail::read_pod<std::uint32_t>(is) != sizeof(Scalar)) throw io_error("mlp load: scalar width mismatch");
    mlp_model<Scalar> m;
    const auto n = detail::read_pod<std::uint32_t>(is);
    for (std::uint32_t i = 0; i < n; ++i) m.arch.layers.push_back(detail::read_pod<std::uint64_t>(is));
    for (std::uint32_t i = 0; i + 1 < n; ++i)
        m.arch.activations.push_back(static_cast<activation>(detail::read_pod<std::uint8_t>(is)));
    validate(m.arch);
    for (std::size_t i = 0; i + 1 < m.arch.layers.size(); ++i) {
        typename mlp_model<Scalar>::matrix w(static_cast<Eigen::Index>(m.arch.layers[i + 1]),
                                             static_cast<Eigen::Index>(m.arch.layers[i]));
        typename mlp_model<Scalar>::vector b(static_cast<Eigen::Index>(m.arch.layers[i + 1]));
        is.read(reinterpret_cast<char*>(w.data()), static_cast<std::streamsize>(sizeof(Scalar) * static_cast<std::size_t>(w.size())));
        is.read(reinterpret_cast<char*>(b.data()), static_cast<std::streamsize>(sizeof(Scalar) * static_cast<std::size_t>(b.size())));
        if (!is) throw io_error("mlp load: truncated parameters in " + path);
        m.weights.push_back(std::move(w));
        m.biases.push_back(std::move(b));
    }
    return m;
}

} // namespace ncl

#endif // NCL_MLP_HPP
