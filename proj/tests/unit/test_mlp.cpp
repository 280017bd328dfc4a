#include "catch_amalgamated.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>

#include "ncl/harness/experiments.hpp"
#include "ncl/mlp.hpp"

using namespace ncl;
using Catch::Approx;

namespace {

mlp_architecture small_arch(activation hidden) {
    return {{5, 7, 4, 3}, {hidden, activation::relu, activation::softmax}};
}

std::vector<double> random_input(std::mt19937_64& rng, std::size_t n) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<double> x(n);
    for (auto& v : x) v = u(rng);
    return x;
}

std::string temp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / ("ncl_test_" + name)).string();
}

} // namespace

TEST_CASE("baseline architecture", "[mlp]") {
    const auto a = mlp_architecture::baseline();
    CHECK(a.layers == std::vector<std::size_t>{2000, 5000, 500, 100, 30, 2});
    CHECK(a.activations.front() == activation::sigmoid);
    CHECK(a.activations.back() == activation::softmax);
    CHECK_NOTHROW(validate(a));
    CHECK_THROWS_AS(validate(mlp_architecture{{3, 2}, {activation::relu}}), config_error);
    CHECK_THROWS_AS(validate(mlp_architecture{{3, 4, 2}, {activation::softmax, activation::softmax}}), config_error);
    CHECK_THROWS_AS(validate(mlp_architecture{{3, 2}, {}}), config_error);
}

TEST_CASE("softmax output is a distribution", "[mlp]") {
    std::mt19937_64 rng(1);
    const mlp_model<double> m(small_arch(activation::sigmoid), 3);
    for (int i = 0; i < 20; ++i) {
        const auto r = forward(m, random_input(rng, 5));
        double sum = 0.0;
        for (double p : r.probabilities) {
            CHECK(p > 0.0);
            CHECK(p < 1.0);
            sum += p;
        }
        CHECK(sum == Approx(1.0).margin(1e-12));
        CHECK(r.activations.size() == 4);
    }
}

TEST_CASE("zero parameters give a uniform output", "[mlp]") {
    mlp_model<double> m(mlp_architecture{{4, 3, 2}, {activation::relu, activation::softmax}}, 0);
    for (auto& w : m.weights) w.setZero();
    const auto r = forward(m, std::vector{0.3, -0.2, 0.9, 0.1});
    CHECK(r.probabilities == std::vector{0.5, 0.5});
}

TEST_CASE("softmax ignores a common shift of the logits", "[mlp]") {
    Eigen::MatrixXd z(3, 1), shifted(3, 1);
    z << 0.2, -1.0, 2.5;
    shifted = z.array() + 40.0;
    detail::apply_activation(z, activation::softmax);
    detail::apply_activation(shifted, activation::softmax);
    for (Eigen::Index i = 0; i < 3; ++i) CHECK(z(i, 0) == Approx(shifted(i, 0)).margin(1e-14));
}

TEST_CASE("backpropagation matches finite differences", "[mlp][property]") {
    std::mt19937_64 rng(7);
    for (auto hidden : {activation::sigmoid, activation::relu, activation::identity}) {
        for (std::uint64_t seed = 0; seed < 5; ++seed) {
            const mlp_model<double> m(small_arch(hidden), seed);
            const auto x = random_input(rng, 5);
            const int label = static_cast<int>(seed % 3);
            CHECK(gradient_check(m, x, label) <= 1e-5);
        }
    }
}

TEST_CASE("a corrupted gradient is caught", "[mlp]") {
    // The output-bias gradient p - onehot is never zero, so scaling it must show.
    std::mt19937_64 rng(9);
    const mlp_model<double> m(small_arch(activation::sigmoid), 1);
    const auto x = random_input(rng, 5);
    const auto err = gradient_check<double>(m, x, 1, 1e-5, [](mlp_gradients<double>& g) { g.biases.back()(0) *= 3.0; });
    CHECK(err > 1e-2);
}

TEST_CASE("saturated correct prediction has vanishing gradients", "[mlp]") {
    mlp_model<double> m(mlp_architecture{{3, 4, 2}, {activation::sigmoid, activation::softmax}}, 2);
    m.weights[1].setZero();
    m.biases[1] << 40.0, -40.0;
    const std::vector x{0.1, 0.4, -0.3};
    using mat = mlp_model<double>::matrix;
    mat in(3, 1);
    in << 0.1, 0.4, -0.3;
    const int label[1] = {0};
    const auto g = backward(m, forward_batch(m, in), label);
    double largest = 0.0;
    for (const auto& w : g.weights) largest = std::max(largest, w.cwiseAbs().maxCoeff());
    CHECK(largest < 1e-30);
    CHECK(gradient_check(m, x, 0) <= 1e-5);
}

TEST_CASE("training separates a linearly separable toy set", "[mlp]") {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<std::vector<double>> xs;
    std::vector<int> ys;
    while (xs.size() < 200) {
        const double a = u(rng), b = u(rng);
        if (std::abs(a + b) < 0.2) continue; // keep a margin
        xs.push_back({a, b});
        ys.push_back(a + b > 0.0 ? 1 : 0);
    }
    mlp_model<double> m(mlp_architecture{{2, 8, 2}, {activation::relu, activation::softmax}}, 4);
    training_config cfg;
    cfg.learning_rate = 0.05;
    cfg.batch_size = 16;
    cfg.seed = 3;
    const auto hist = train(m, std::span<const std::vector<double>>(xs), std::span<const int>(ys), cfg);
    CHECK(hist.epoch_loss.size() == 30);
    CHECK(hist.epoch_loss.back() < hist.epoch_loss.front());
    const auto pred = predict_all(m, std::span<const std::vector<double>>(xs));
    CHECK(pred == ys);
}

TEST_CASE("zero learning rate leaves parameters untouched", "[mlp]") {
    std::mt19937_64 rng(5);
    std::vector<std::vector<double>> xs;
    std::vector<int> ys;
    for (int i = 0; i < 40; ++i) {
        xs.push_back(random_input(rng, 5));
        ys.push_back(i % 3);
    }
    mlp_model<double> m(small_arch(activation::sigmoid), 8);
    const auto before = m;
    training_config cfg;
    cfg.learning_rate = 0.0;
    cfg.epochs = 3;
    train(m, std::span<const std::vector<double>>(xs), std::span<const int>(ys), cfg);
    for (std::size_t i = 0; i < m.weights.size(); ++i) {
        CHECK(m.weights[i] == before.weights[i]);
        CHECK(m.biases[i] == before.biases[i]);
    }
}

TEST_CASE("training is reproducible and validates input", "[mlp]") {
    std::mt19937_64 rng(6);
    std::vector<std::vector<double>> xs;
    std::vector<int> ys;
    for (int i = 0; i < 50; ++i) {
        xs.push_back(random_input(rng, 5));
        ys.push_back(i % 2);
    }
    training_config cfg;
    cfg.epochs = 2;
    cfg.learning_rate = 1e-2;
    mlp_model<float> a(small_arch(activation::relu), 1), b(small_arch(activation::relu), 1);
    train(a, std::span<const std::vector<double>>(xs), std::span<const int>(ys), cfg);
    train(b, std::span<const std::vector<double>>(xs), std::span<const int>(ys), cfg);
    CHECK(a.weights[0] == b.weights[0]);

    const std::vector<int> bad_labels(50, 7);
    CHECK_THROWS_AS(train(a, std::span<const std::vector<double>>(xs), std::span<const int>(bad_labels), cfg),
                    config_error);
    auto nan_xs = xs;
    nan_xs[0][0] = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(train(a, std::span<const std::vector<double>>(nan_xs), std::span<const int>(ys), cfg),
                    divergence_error);
    std::vector<std::vector<double>> short_xs{{0.1, 0.2}};
    const std::vector<int> one{0};
    CHECK_THROWS_AS(train(a, std::span<const std::vector<double>>(short_xs), std::span<const int>(one), cfg),
                    dimension_error);
}

TEST_CASE("hidden activations of the baseline network", "[mlp]") {
    const mlp_model<float> m(mlp_architecture::baseline(), 1);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> x(2000);
    for (auto& v : x) v = u(rng);
    const auto h = hidden_activations(m, x);
    CHECK(h.size() == 30);
    CHECK(hidden_activations(m, x) == h);
    CHECK(hidden_activations(m, x, 1).size() == 5000);
    CHECK_THROWS_AS(hidden_activations(m, x, 5), config_error);
    CHECK_THROWS_AS(hidden_activations(m, x, 0), config_error);
    CHECK_THROWS_AS(forward(m, std::vector<double>(10, 0.0)), dimension_error);
}

TEST_CASE("model files round-trip exactly", "[mlp]") {
    const mlp_model<float> m(small_arch(activation::sigmoid), 12);
    const auto path = temp_path("mlp.bin");
    save(m, path);
    const auto back = load_mlp<float>(path);
    CHECK(back.arch.layers == m.arch.layers);
    CHECK(back.arch.activations == m.arch.activations);
    for (std::size_t i = 0; i < m.weights.size(); ++i) {
        CHECK(back.weights[i] == m.weights[i]);
        CHECK(back.biases[i] == m.biases[i]);
    }
    CHECK_THROWS_AS(load_mlp<double>(path), io_error);
    {
        std::ofstream os(path, std::ios::binary);
        os << "garbage";
    }
    CHECK_THROWS_AS(load_mlp<float>(path), io_error);
    std::remove(path.c_str());
    CHECK_THROWS_AS(load_mlp<float>(path), io_error);
}

TEST_CASE("baseline MLP separates weakly coupled tent maps on the standard split", "[mlp][slow]") {
    experiment_config cfg;
    const auto trials = generate_trials(cfg.system, 0.3, 1000, 0);
    const auto split = split_train_test(trials, 0);
    const auto clf = train_classifier(method_kind::mlp, split.train, cfg);
    CHECK(clf.macro_f1(split.test) == 1.0);
}
