#include "catch_amalgamated.hpp"

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "ncl/harness/dataset.hpp"
#include "ncl/harness/experiments.hpp"
#include "ncl/harness/io.hpp"
#include "ncl/harness/parallel.hpp"

using namespace ncl;
using Catch::Approx;

namespace {

fs::path scratch_dir(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("ncl_harness_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

void write_text(const fs::path& p, const std::string& text) {
    std::ofstream os(p);
    os << text;
}

std::string prey_predator_csv(std::size_t rows) {
    std::ostringstream os;
    os << "time,prey,predator\n";
    for (std::size_t i = 0; i < rows; ++i) {
        const double t = static_cast<double>(i);
        os << t * 0.5 << ',' << 100 + 60 * std::sin(0.4 * t) + 7 * std::sin(1.7 * t) << ','
           << 40 + 25 * std::sin(0.4 * t - 1.0) + 5 * std::cos(2.3 * t) << '\n';
    }
    return os.str();
}

} // namespace

TEST_CASE("standard split has the expected class counts", "[harness]") {
    const auto trials = generate_trials(system_spec::tent(0.65, 0.47), 0.2, 1000, 1);
    const auto s = split_train_test(trials, 5);
    CHECK(s.train.size() == 1600);
    CHECK(s.test.size() == 400);
    CHECK(std::count(s.train.labels.begin(), s.train.labels.end(), 0) == 801);
    CHECK(std::count(s.train.labels.begin(), s.train.labels.end(), 1) == 799);
    CHECK(std::count(s.test.labels.begin(), s.test.labels.end(), 0) == 199);
    CHECK(std::count(s.test.labels.begin(), s.test.labels.end(), 1) == 201);

    std::set<std::size_t> train_ids(s.train_ids.begin(), s.train_ids.end());
    std::set<std::size_t> test_ids(s.test_ids.begin(), s.test_ids.end());
    CHECK(train_ids.size() == 1600);
    CHECK(test_ids.size() == 400);
    for (auto id : test_ids) CHECK(train_ids.count(id) == 0);

    const auto again = split_train_test(trials, 5);
    CHECK(again.train_ids == s.train_ids);
    CHECK(split_train_test(trials, 6).train_ids != s.train_ids);

    // Master instances carry label 0, slaves label 1.
    for (std::size_t i = 0; i < 20; ++i) {
        const auto id = s.train_ids[i];
        const auto& p = trials[id / 2];
        CHECK(s.train.instances[i] == (id % 2 == 0 ? p.master : p.slave));
        CHECK(s.train.labels[i] == static_cast<int>(id % 2));
    }
    CHECK_THROWS_AS(split_train_test(std::vector<time_series_pair>(10), 0), config_error);
}

TEST_CASE("scaled split counts", "[harness]") {
    const auto c = split_counts::scaled(200);
    CHECK(c.train0 + c.test0 == 200);
    CHECK(c.train1 + c.test1 == 200);
    CHECK(c.train0 == 160);
    CHECK(split_counts{}.trials() == 1000);
}

TEST_CASE("trial generation is independent of count and order", "[harness]") {
    const auto sys = system_spec::logistic(4.0, 3.82);
    const auto few = generate_trials(sys, 0.3, 3, 9);
    const auto many = generate_trials(sys, 0.3, 8, 9);
    for (std::size_t i = 0; i < 3; ++i) CHECK(few[i].master == many[i].master);
    CHECK(generate_trial(sys, 0.3, derive_seed(9, 2)).slave == many[2].slave);
}

TEST_CASE("parallel_for visits every index and rethrows", "[harness]") {
    std::vector<int> hits(100, 0);
    parallel_for(hits.size(), [&](std::size_t i) { hits[i] += 1; }, 4);
    for (int h : hits) CHECK(h == 1);
    CHECK_THROWS_AS(parallel_for(10, [](std::size_t i) { if (i == 3) throw config_error("boom"); }, 3), config_error);
}

TEST_CASE("csv round trips and errors", "[harness]") {
    const auto dir = scratch_dir("csv");
    const csv_table t{{"a", "b"}, {{"1", "x"}, {"2.5", "y"}}};
    write_csv(dir / "t.csv", t);
    CHECK(read_csv(dir / "t.csv") == t);
    CHECK(t.column("b") == 1);
    CHECK_THROWS_WITH(t.column("zzz"), Catch::Matchers::ContainsSubstring("zzz"));
    write_text(dir / "bad.csv", "a,b\n1\n");
    CHECK_THROWS_AS(read_csv(dir / "bad.csv"), io_error);
    write_text(dir / "empty.csv", "# only a comment\n");
    CHECK_THROWS_AS(read_csv(dir / "empty.csv"), io_error);
    CHECK_THROWS_AS(read_csv(dir / "missing.csv"), io_error);
    CHECK_THROWS_AS(parse_double("1.5x"), io_error);
    CHECK(parse_double(format_double(0.1 + 0.2)) == 0.1 + 0.2);
}

TEST_CASE("trial and feature files round trip exactly", "[harness]") {
    const auto dir = scratch_dir("trials");
    const auto p = generate_trial(system_spec::ar(), 0.4, 3);
    write_pair_csv(dir / trial_file_name(0), p);
    write_pair_csv(dir / trial_file_name(1), p);
    CHECK(trial_file_name(12) == "trial_0012.csv");
    const auto files = list_trial_files(dir);
    REQUIRE(files.size() == 2);
    const auto back = read_pair_csv(files[0]);
    CHECK(back.master == p.master);
    CHECK(back.slave == p.slave);
    CHECK_THROWS_AS(list_trial_files(dir / "nope"), io_error);

    const auto f = transform_instance(normalization{}.apply(p.master), neurochaos_config{});
    write_features_csv(dir / "f.csv", f);
    const auto fb = read_features_csv(dir / "f.csv");
    REQUIRE(fb.rows.size() == f.rows.size());
    for (std::size_t i = 0; i < f.rows.size(); ++i) CHECK(fb.rows[i] == f.rows[i]);
}

TEST_CASE("ChaosNet models round trip", "[harness]") {
    const auto dir = scratch_dir("model");
    labeled_set train;
    train.push_back({0.1, 0.5, 0.9, 0.3}, 0);
    train.push_back({0.8, 0.2, 0.4, 0.6}, 1);
    const auto m = fit(train, {0.56, 0.499, 0.171, 10000}, normalization_mode::training_range);
    save_chaosnet(dir / "m.txt", m);
    const auto back = load_chaosnet(dir / "m.txt");
    CHECK(back.config.q == m.config.q);
    CHECK(back.norm.mode == normalization_mode::training_range);
    CHECK(back.norm.lo == m.norm.lo);
    CHECK(back.norm.hi == m.norm.hi);
    for (std::size_t k = 0; k < 2; ++k) CHECK(back.prototypes[k].mean_vector == m.prototypes[k].mean_vector);
    write_text(dir / "bad.txt", "no header\n");
    CHECK_THROWS_AS(load_chaosnet(dir / "bad.txt"), io_error);
}

TEST_CASE("export refuses empty tables and writes a manifest", "[harness]") {
    const auto dir = scratch_dir("export");
    CHECK_THROWS_AS(export_results(to_table(std::vector<result_row>{}), dir / "r.csv", {}), io_error);
    std::vector<result_row> rows{{0.1, method_kind::chaosnet, 1.0, 17, "same"}, {0.2, method_kind::mlp, 0.5, 18, "I"}};
    const std::vector<run_failure> failures{{0.3, 19, "rank deficient"}};
    export_results(to_table(rows), dir / "r.csv", {{"base_seed", 17}}, failures);
    const auto back = read_csv(dir / "r.csv");
    CHECK(back == to_table(rows));
    const auto m = read_manifest(manifest_path_for(dir / "r.csv"));
    CHECK(m["base_seed"] == 17);
    CHECK(m["rows"] == 2);
    CHECK(m["failures"].size() == 1);
    CHECK(m["failures"][0]["seed"] == 19);
}

TEST_CASE("sweeps are reproducible from their config", "[harness]") {
    experiment_config cfg;
    cfg.system.length = 300;
    cfg.trials = 40;
    cfg.etas = {0.1, 0.2};
    cfg.base_seed = 100;
    const auto a = run_eta_sweep(cfg, method_kind::chaosnet);
    const auto b = run_eta_sweep(cfg, method_kind::chaosnet);
    REQUIRE(a.rows.size() == 2);
    CHECK(a.failures.empty());
    CHECK(to_table(a.rows) == to_table(b.rows));
    CHECK(a.rows[0].seed == 100);
    CHECK(a.rows[1].seed == 101);
    for (const auto& r : a.rows) {
        CHECK(r.macro_f1 >= 0.0);
        CHECK(r.macro_f1 <= 1.0);
    }
}

TEST_CASE("failed units are listed, not reported", "[harness]") {
    experiment_config cfg;
    cfg.etas = {0.1};
    cfg.trials = 7;
    // A length-1 AR series is constant per instance and cannot be scaled.
    cfg.system = system_spec::ar();
    cfg.system.length = 1;
    const auto r = run_eta_sweep(cfg, method_kind::chaosnet);
    CHECK(r.rows.empty());
    REQUIRE(r.failures.size() == 1);
    CHECK(r.failures[0].seed == cfg.base_seed);
}

TEST_CASE("eta grid and parsers", "[harness]") {
    const auto g = eta_grid(0.0, 0.9, 0.1);
    REQUIRE(g.size() == 10);
    CHECK(g[3] == 0.3);
    CHECK(g.back() == 0.9);
    CHECK(eta_grid(0.0, 1.0, 0.1).size() == 11);
    CHECK_THROWS_AS(eta_grid(0.5, 0.1, 0.1), config_error);
    CHECK(parse_transfer_case("III") == transfer_case::III);
    CHECK_THROWS_AS(parse_transfer_case("V"), config_error);
    CHECK_THROWS_AS(parse_method("svm"), config_error);
    CHECK_THROWS_AS(parse_system("henon"), config_error);
    CHECK(transfer_test_system(transfer_case::II).b1 == 0.1);
    CHECK(transfer_test_system(transfer_case::IV).kind == system_kind::logistic);
}

TEST_CASE("transfer evaluates each case without refitting", "[harness]") {
    experiment_config cfg;
    cfg.system.length = 200;
    cfg.trials = 30;
    cfg.etas = {0.2};
    const transfer_case cases[] = {transfer_case::I, transfer_case::IV};
    const method_kind methods[] = {method_kind::chaosnet};
    const auto r = run_transfer(cases, methods, cfg);
    REQUIRE(r.rows.size() == 2);
    CHECK(r.rows[0].setting == "I");
    CHECK(r.rows[1].setting == "IV");
    CHECK_THROWS_AS(run_transfer(std::span<const transfer_case>{}, methods, cfg), config_error);
}

TEST_CASE("causality experiments aggregate per eta", "[harness]") {
    experiment_config cfg;
    cfg.etas = {0.0, 0.5};
    cfg.system.length = 400;
    cfg.ccc = {100, 15, 50, 4};
    const auto c = run_ccc_experiment(causality_source::raw, cfg, 6);
    REQUIRE(c.rows.size() == 2);
    CHECK(c.rows[0].trials == 6);
    CHECK(c.rows[0].measure == "ccc");

    experiment_config ar;
    ar.system = system_spec::ar();
    ar.system.length = 300;
    ar.etas = {0.6};
    ar.chaos = {0.78, 0.499, 0.171, 10000};
    ar.gc = {5, 0.05};
    const auto g = run_gc_experiment(causality_source::chaosfex_firing_time, ar, 5);
    REQUIRE(g.rows.size() == 1);
    CHECK(g.rows[0].source == "firing_time");
    CHECK(g.rows[0].reject_master_to_slave >= 0.0);
    CHECK_THROWS_AS(run_gc_experiment(causality_source::raw, ar, 5), config_error);
    CHECK_THROWS_AS(run_ccc_experiment(causality_source::mlp_hidden, cfg, 5), config_error);
}

TEST_CASE("prey-predator loader", "[harness]") {
    const auto dir = scratch_dir("pp");
    write_text(dir / "ok.csv", prey_predator_csv(71));
    std::ostringstream log;
    const auto p = load_prey_predator(dir / "ok.csv", log);
    CHECK(p.master.size() == 62);
    CHECK(p.slave.size() == 62);
    CHECK(log.str().empty());

    write_text(dir / "short.csv", prey_predator_csv(60));
    const auto s = load_prey_predator(dir / "short.csv", log);
    CHECK(s.master.size() == 51);
    CHECK_THAT(log.str(), Catch::Matchers::ContainsSubstring("60 rows"));

    write_text(dir / "nocol.csv", "time,prey,wolves\n0,1,2\n");
    CHECK_THROWS_WITH(load_prey_predator(dir / "nocol.csv", log), Catch::Matchers::ContainsSubstring("predator"));
    write_text(dir / "tiny.csv", prey_predator_csv(5));
    CHECK_THROWS_AS(load_prey_predator(dir / "tiny.csv", log), io_error);

    const auto rows = run_prey_predator(p);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].source == "raw");
    CHECK(rows[1].source == "firing_time");
}
