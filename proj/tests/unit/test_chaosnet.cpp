#include "catch_amalgamated.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <set>

#include "ncl/chaosnet.hpp"
#include "ncl/harness/dataset.hpp"

using namespace ncl;
using Catch::Approx;

namespace {

const neurochaos_config tent_cfg{0.56, 0.499, 0.171, 10000};

labeled_set small_tent_set(double eta, std::size_t trials, std::size_t length, std::uint64_t seed) {
    auto sys = system_spec::tent(0.65, 0.47);
    sys.length = length;
    return as_labeled(generate_trials(sys, eta, trials, seed));
}

} // namespace

TEST_CASE("cosine similarity examples", "[chaosnet]") {
    const std::vector u{0.3, -1.2, 4.0};
    CHECK(cosine_similarity(u, u) == Approx(1.0));
    CHECK(cosine_similarity(std::vector{1.0, 0.0}, std::vector{0.0, 1.0}) == 0.0);
    CHECK(cosine_similarity(std::vector{1.0, 0.0}, std::vector{0.0, 0.0}) == 0.0);
    CHECK(cosine_similarity(std::vector{1.0, 2.0}, std::vector{-1.0, -2.0}) == Approx(-1.0));
    CHECK_THROWS_AS(cosine_similarity(std::vector{1.0}, std::vector{1.0, 2.0}), dimension_error);
}

TEST_CASE("cosine similarity is invariant to scale and joint permutation", "[chaosnet][property]") {
    std::mt19937_64 rng(8);
    std::normal_distribution<double> g(0.0, 1.0);
    std::uniform_real_distribution<double> scale(0.01, 100.0);
    for (int t = 0; t < 500; ++t) {
        std::vector<double> u(12), v(12);
        for (auto& x : u) x = g(rng);
        for (auto& x : v) x = g(rng);
        const double base = cosine_similarity(u, v);
        CHECK(base >= -1.0);
        CHECK(base <= 1.0);
        auto su = u;
        const double c = scale(rng);
        for (auto& x : su) x *= c;
        CHECK(cosine_similarity(su, v) == Approx(base).margin(1e-12));
        std::vector<std::size_t> perm(12);
        std::iota(perm.begin(), perm.end(), 0);
        std::shuffle(perm.begin(), perm.end(), rng);
        std::vector<double> pu(12), pv(12);
        for (std::size_t i = 0; i < 12; ++i) {
            pu[i] = u[perm[i]];
            pv[i] = v[perm[i]];
        }
        CHECK(cosine_similarity(pu, pv) == Approx(base).margin(1e-12));
    }
}

TEST_CASE("prediction rule on prototypes", "[chaosnet]") {
    const std::vector<class_prototype> protos{{0, {1.0, 0.0, 2.0}}, {1, {0.0, 3.0, 1.0}}};
    CHECK(predict_features(protos, std::vector{1.0, 0.0, 2.0}) == 0);
    CHECK(predict_features(protos, std::vector{0.0, 6.0, 2.0}) == 1);
    CHECK(predict_features(protos, std::vector{0.0, 0.3, 0.1}) == 1);
    // Equal similarity to both prototypes resolves to the lower label.
    const std::vector<class_prototype> sym{{0, {1.0, 0.0}}, {1, {0.0, 1.0}}};
    CHECK(predict_features(sym, std::vector{2.0, 2.0}) == 0);
    CHECK(predict_features(sym, std::vector{0.0, 0.0}) == 0);
    CHECK_THROWS_AS(predict_features(sym, std::vector{1.0}), dimension_error);
}

TEST_CASE("classifier decisions are invariant to feature scale and coordinate order", "[chaosnet][property]") {
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int t = 0; t < 300; ++t) {
        std::vector<class_prototype> protos(3);
        for (int k = 0; k < 3; ++k) {
            protos[static_cast<std::size_t>(k)].label = k;
            for (int j = 0; j < 8; ++j) protos[static_cast<std::size_t>(k)].mean_vector.push_back(u(rng));
        }
        std::vector<double> f(8);
        for (auto& x : f) x = u(rng);
        const int base = predict_features(protos, f);
        auto scaled = f;
        for (auto& x : scaled) x *= 37.5;
        CHECK(predict_features(protos, scaled) == base);
        std::vector<std::size_t> perm(8);
        std::iota(perm.begin(), perm.end(), 0);
        std::shuffle(perm.begin(), perm.end(), rng);
        auto pp = protos;
        std::vector<double> pf(8);
        for (std::size_t i = 0; i < 8; ++i) {
            pf[i] = f[perm[i]];
            for (std::size_t k = 0; k < 3; ++k) pp[k].mean_vector[i] = protos[k].mean_vector[perm[i]];
        }
        CHECK(predict_features(pp, pf) == base);
    }
}

TEST_CASE("one instance per class gives that instance as prototype", "[chaosnet]") {
    labeled_set train;
    train.push_back({0.1, 0.5, 0.9, 0.3}, 0);
    train.push_back({0.8, 0.2, 0.4, 0.6}, 1);
    const auto m = fit(train, tent_cfg);
    const gls_neuron neuron(tent_cfg);
    for (int k = 0; k < 2; ++k) {
        const auto expected = transform_instance(m.norm.apply(train.instances[static_cast<std::size_t>(k)]), neuron).flatten();
        CHECK(m.prototypes[static_cast<std::size_t>(k)].mean_vector == expected);
        CHECK(predict(m, train.instances[static_cast<std::size_t>(k)]) == k);
    }
    CHECK(m.instance_length() == 4);
}

TEST_CASE("duplicating the training set leaves the model unchanged", "[chaosnet]") {
    const auto train = small_tent_set(0.2, 30, 200, 4);
    auto doubled = train;
    for (std::size_t i = 0; i < train.size(); ++i) doubled.push_back(train.instances[i], train.labels[i]);
    const auto a = fit(train, tent_cfg);
    const auto b = fit(doubled, tent_cfg);
    for (std::size_t k = 0; k < 2; ++k)
        for (std::size_t j = 0; j < a.prototypes[k].mean_vector.size(); ++j)
            REQUIRE(b.prototypes[k].mean_vector[j] == Approx(a.prototypes[k].mean_vector[j]).epsilon(1e-12));
}

TEST_CASE("evaluate reports perfect and degenerate cases", "[chaosnet]") {
    labeled_set train;
    train.push_back({0.1, 0.5, 0.9, 0.3}, 0);
    train.push_back({0.8, 0.2, 0.4, 0.6}, 1);
    const auto m = fit(train, tent_cfg);
    CHECK(evaluate(m, train).macro_f1 == 1.0);
    CHECK_THROWS_AS(evaluate(m, labeled_set{}), config_error);
    CHECK_THROWS_AS(predict(m, std::vector{0.1, 0.2}), dimension_error);
}

TEST_CASE("fit validates its input", "[chaosnet]") {
    labeled_set one_class;
    one_class.push_back({0.1, 0.2}, 0);
    one_class.push_back({0.3, 0.9}, 0);
    CHECK_THROWS_AS(fit(one_class, tent_cfg), config_error);
    CHECK_THROWS_AS(fit(labeled_set{}, tent_cfg), config_error);
    labeled_set gap;
    gap.push_back({0.1, 0.2}, 0);
    gap.push_back({0.3, 0.9}, 2);
    CHECK_THROWS_AS(fit(gap, tent_cfg), config_error);
    labeled_set constant;
    constant.push_back({0.5, 0.5}, 0);
    constant.push_back({0.3, 0.9}, 1);
    CHECK_THROWS_AS(fit(constant, tent_cfg), config_error);
}

TEST_CASE("normalization modes", "[chaosnet]") {
    labeled_set d;
    d.push_back({2.0, 4.0, 6.0}, 0);
    d.push_back({-2.0, 0.0, 10.0}, 1);
    const auto per = fit_normalization(d, normalization_mode::per_instance);
    CHECK(per.apply(std::vector{2.0, 4.0, 6.0}) == std::vector{0.0, 0.5, 1.0});
    const auto global = fit_normalization(d, normalization_mode::training_range);
    CHECK(global.lo == -2.0);
    CHECK(global.hi == 10.0);
    CHECK(global.apply(std::vector{4.0, 12.0}) == std::vector{0.5, 1.0});
    // Per-instance scaling makes the classifier blind to affine changes of an instance.
    const auto train = small_tent_set(0.3, 20, 150, 1);
    const auto m = fit(train, tent_cfg);
    for (std::size_t i = 0; i < 6; ++i) {
        auto x = train.instances[i];
        for (auto& v : x) v = 3.0 * v - 7.0;
        CHECK(predict(m, x) == predict(m, train.instances[i]));
    }
}

TEST_CASE("stratified folds partition each class", "[chaosnet]") {
    std::vector<int> labels;
    for (int i = 0; i < 23; ++i) labels.push_back(0);
    for (int i = 0; i < 17; ++i) labels.push_back(1);
    const auto folds = stratified_folds(labels, 5, 3);
    REQUIRE(folds.size() == 5);
    std::set<std::size_t> seen;
    for (const auto& f : folds) {
        std::size_t c0 = 0, c1 = 0;
        for (auto i : f) {
            CHECK(seen.insert(i).second);
            (labels[i] == 0 ? c0 : c1)++;
        }
        CHECK((c0 == 4 || c0 == 5));
        CHECK((c1 == 3 || c1 == 4));
    }
    CHECK(seen.size() == labels.size());
    CHECK(stratified_folds(labels, 5, 3) == folds);
    CHECK(stratified_folds(labels, 5, 4) != folds);
    CHECK_THROWS_AS(stratified_folds(std::vector{0, 0, 1}, 2, 0), config_error);
}

TEST_CASE("q grid covers the default range", "[chaosnet]") {
    const auto g = q_grid();
    REQUIRE(g.size() == 98);
    CHECK(g.front() == 0.01);
    CHECK(g.back() == 0.98);
    CHECK(std::find(g.begin(), g.end(), 0.56) != g.end());
    CHECK(std::find(g.begin(), g.end(), 0.78) != g.end());
}

TEST_CASE("tune_q matches a direct cross-validation", "[chaosnet]") {
    const auto train = small_tent_set(0.1, 25, 120, 6);
    const std::vector grid{0.3, 0.56};
    const auto res = tune_q(train, 0.499, 0.171, grid, 7);
    REQUIRE(res.table.size() == 2);
    const auto folds = stratified_folds(train.labels, 5, 7);
    for (std::size_t gi = 0; gi < grid.size(); ++gi) {
        const neurochaos_config cfg{grid[gi], 0.499, 0.171, 10000};
        double total = 0.0;
        for (const auto& f : folds) {
            std::vector<std::size_t> rest;
            for (std::size_t i = 0; i < train.size(); ++i)
                if (!std::binary_search(f.begin(), f.end(), i)) rest.push_back(i);
            const auto m = fit(train.subset(rest), cfg);
            total += evaluate(m, train.subset(f)).macro_f1;
        }
        CHECK(res.table[gi].mean_macro_f1 == Approx(total / 5.0).margin(1e-12));
        CHECK(res.table[gi].fold_macro_f1.size() == 5);
    }
    CHECK(res.best_score == std::max(res.table[0].mean_macro_f1, res.table[1].mean_macro_f1));
    CHECK(std::find(res.maximizers.begin(), res.maximizers.end(), res.best_q) != res.maximizers.end());
    CHECK(res.best_q == res.maximizers.front());
}

TEST_CASE("single-point grid returns that q", "[chaosnet]") {
    const auto train = small_tent_set(0.2, 15, 100, 2);
    const std::vector grid{0.42};
    const auto res = tune_q(train, 0.499, 0.171, grid);
    CHECK(res.best_q == 0.42);
    CHECK(res.maximizers == grid);
    CHECK(res.best_score == res.table.front().mean_macro_f1);
    CHECK_THROWS_AS(tune_q(train, 0.499, 0.171, std::vector<double>{}), config_error);
}

TEST_CASE("weakly coupled tent maps are separated on the standard split", "[chaosnet][slow]") {
    const auto trials = generate_trials(system_spec::tent(0.65, 0.47), 0.3, 1000, 0);
    const auto split = split_train_test(trials, 0);
    const auto m = fit(split.train, tent_cfg);
    CHECK(evaluate(m, split.test).macro_f1 == 1.0);
}
