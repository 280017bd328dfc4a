// Command-line front end for data generation, classification and causality experiments.

#include <cstdint>
#include <exception>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ncl/ncl.hpp"

namespace {

using namespace ncl;

struct common_options {
    std::string system = "tent";
    double b1 = 0.65, b2 = 0.47, A1 = 4.0, A2 = 3.82, a1 = 0.8, a2 = 0.9, gamma = 0.03;
    std::size_t length = 2000, transient = 500;
    double eta_start = 0.0, eta_stop = 0.9, eta_step = 0.1;
    std::size_t trials = 1000;
    std::uint64_t seed = 0, split_seed = 0;
    double q = 0.56, b = 0.499, epsilon = 0.171;
    std::size_t max_iter = 10000;
    std::string normalization = "per_instance";
    std::size_t epochs = 30, batch = 32;
    double lr = 1e-4;
    std::uint64_t mlp_seed = 0, init_seed = 1;
    std::size_t hidden_layer = 4;
    std::size_t L = 100, w = 15, delta = 50, bins = 4;
    std::size_t max_order = 30;
    double alpha = 0.05;

    system_spec spec() const {
        system_spec s;
        s.kind = parse_system(system);
        s.b1 = b1;
        s.b2 = b2;
        s.A1 = A1;
        s.A2 = A2;
        s.a1 = a1;
        s.a2 = a2;
        s.gamma = gamma;
        s.length = length;
        s.transient = transient;
        return s;
    }

    neurochaos_config chaos() const { return {q, b, epsilon, max_iter}; }

    experiment_config experiment() const {
        experiment_config c;
        c.system = spec();
        c.etas = eta_grid(eta_start, eta_stop, eta_step);
        c.trials = trials;
        c.base_seed = seed;
        c.split_seed = split_seed;
        c.chaos = chaos();
        c.norm = parse_normalization(normalization);
        c.mlp.epochs = epochs;
        c.mlp.batch_size = batch;
        c.mlp.learning_rate = lr;
        c.mlp.seed = mlp_seed;
        c.mlp_init_seed = init_seed;
        c.mlp_hidden_layer = hidden_layer;
        c.ccc = {L, w, delta, bins};
        c.gc = {max_order, alpha};
        return c;
    }
};

void add_system(CLI::App* app, common_options& o) {
    app->add_option("--system", o.system, "ar, tent or logistic")->capture_default_str();
    app->add_option("--b1", o.b1, "master skew-tent peak")->capture_default_str();
    app->add_option("--b2", o.b2, "slave skew-tent peak")->capture_default_str();
    app->add_option("--A1", o.A1, "master logistic parameter")->capture_default_str();
    app->add_option("--A2", o.A2, "slave logistic parameter")->capture_default_str();
    app->add_option("--a1", o.a1, "master AR coefficient")->capture_default_str();
    app->add_option("--a2", o.a2, "slave AR coefficient")->capture_default_str();
    app->add_option("--gamma", o.gamma, "AR noise intensity")->capture_default_str();
    app->add_option("--length", o.length, "retained samples per series")->capture_default_str();
    app->add_option("--transient", o.transient, "discarded initial samples")->capture_default_str();
}

void add_grid(CLI::App* app, common_options& o) {
    app->add_option("--eta-start", o.eta_start)->capture_default_str();
    app->add_option("--eta-stop", o.eta_stop)->capture_default_str();
    app->add_option("--eta-step", o.eta_step)->capture_default_str();
    app->add_option("--trials", o.trials, "trials per eta")->capture_default_str();
    app->add_option("--seed", o.seed, "base seed; eta index k uses seed + k")->capture_default_str();
    app->add_option("--split-seed", o.split_seed)->capture_default_str();
}

void add_chaos(CLI::App* app, common_options& o) {
    app->add_option("--q", o.q, "initial neural activity")->capture_default_str();
    app->add_option("--b", o.b, "GLS map peak / firing-rate threshold")->capture_default_str();
    app->add_option("--epsilon", o.epsilon, "firing neighbourhood radius")->capture_default_str();
    app->add_option("--max-iter", o.max_iter)->capture_default_str();
    app->add_option("--normalization", o.normalization, "per_instance or training_range")->capture_default_str();
}

void add_mlp(CLI::App* app, common_options& o) {
    app->add_option("--epochs", o.epochs)->capture_default_str();
    app->add_option("--batch", o.batch)->capture_default_str();
    app->add_option("--lr", o.lr, "Adam learning rate")->capture_default_str();
    app->add_option("--mlp-seed", o.mlp_seed, "mini-batch shuffle seed")->capture_default_str();
    app->add_option("--init-seed", o.init_seed, "weight initialisation seed")->capture_default_str();
    app->add_option("--hidden-layer", o.hidden_layer, "1-based hidden layer for activations")->capture_default_str();
}

void add_ccc(CLI::App* app, common_options& o) {
    app->add_option("--L", o.L, "past window length")->capture_default_str();
    app->add_option("--w", o.w, "future window length")->capture_default_str();
    app->add_option("--delta", o.delta, "step between windows")->capture_default_str();
    app->add_option("--bins", o.bins)->capture_default_str();
}

void add_gc(CLI::App* app, common_options& o) {
    app->add_option("--max-order", o.max_order)->capture_default_str();
    app->add_option("--alpha", o.alpha)->capture_default_str();
}

std::vector<time_series_pair> load_trials(const std::string& dir) {
    std::vector<time_series_pair> out;
    for (const auto& f : list_trial_files(dir)) out.push_back(read_pair_csv(f));
    return out;
}

dataset_split load_split(const std::string& dir, std::uint64_t split_seed) {
    const auto trials = load_trials(dir);
    const auto counts = trials.size() == 1000 ? split_counts{} : split_counts::scaled(trials.size());
    return split_train_test(trials, split_seed, counts);
}

std::vector<double> load_column(const std::string& path, const std::string& column) {
    return numeric_column(read_csv(path), column, path);
}

nlohmann::json base_manifest(const std::string& command, const CLI::App* app) {
    nlohmann::json args = nlohmann::json::object();
    for (const auto* opt : app->get_options()) {
        if (opt->get_name() == "--help" || opt->count() == 0) continue;
        const auto r = opt->results();
        args[opt->get_name()] = r.size() == 1 ? nlohmann::json(r.front()) : nlohmann::json(r);
    }
    return {{"command", command}, {"arguments", args}};
}

csv_table report_table(const evaluation_report& r, const std::string& method) {
    csv_table t{{"method", "class", "precision", "recall", "f1", "macro_f1"}, {}};
    for (std::size_t k = 0; k < r.f1.size(); ++k)
        t.rows.push_back({method, std::to_string(k), format_double(r.precision[k]), format_double(r.recall[k]),
                          format_double(r.f1[k]), format_double(r.macro_f1)});
    return t;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Neurochaos feature learning and causality toolkit"};
    app.set_config("--config", "", "key = value configuration file; [subcommand] sections apply to that subcommand");
    app.require_subcommand(1);
    common_options o;
    std::string out, input, model_path, column = "master", dir;
    std::string method = "chaosnet", source = "raw", cases = "I,II,III,IV", methods = "chaosnet,mlp";
    std::size_t per_eta = 50;

    // generate
    auto* gen = app.add_subcommand("generate", "simulate coupled master-slave trials at one eta");
    add_system(gen, o);
    double eta = 0.0;
    gen->add_option("--eta", eta, "coupling coefficient")->required();
    gen->add_option("--trials", o.trials)->capture_default_str();
    gen->add_option("--seed", o.seed, "trial i uses derive_seed(seed, i)")->capture_default_str();
    gen->add_option("--out", out, "output directory")->required();
    gen->callback([&] {
        const auto sys = o.spec();
        const auto trials = generate_trials(sys, eta, o.trials, o.seed);
        for (std::size_t i = 0; i < trials.size(); ++i) write_pair_csv(fs::path(out) / trial_file_name(i), trials[i]);
        auto m = base_manifest("generate", gen);
        m["system"] = to_json(sys);
        m["eta"] = eta;
        m["trials"] = o.trials;
        m["seed"] = o.seed;
        write_manifest(fs::path(out) / "generate.manifest.json", m);
        std::cout << "wrote " << trials.size() << " trials to " << out << '\n';
    });

    // features
    auto* feat = app.add_subcommand("features", "ChaosFEX features of one series column");
    add_chaos(feat, o);
    bool prescaled = false;
    feat->add_flag("--prescaled", prescaled, "column already lies in [0,1]; skip per-series min-max scaling");
    feat->add_option("--input", input, "CSV file")->required()->check(CLI::ExistingFile);
    feat->add_option("--column", column)->capture_default_str();
    feat->add_option("--out", out)->required();
    feat->callback([&] {
        const auto raw = load_column(input, column);
        const auto f = transform_instance(prescaled ? raw : normalization{}.apply(raw), o.chaos());
        write_features_csv(out, f);
        auto m = base_manifest("features", feat);
        m["neurochaos"] = to_json(o.chaos());
        m["unrecognized"] = f.unrecognized;
        write_manifest(manifest_path_for(out), m);
    });

    // train / evaluate
    auto* trn = app.add_subcommand("train", "fit ChaosNet on the training split of a trial directory");
    add_chaos(trn, o);
    trn->add_option("--trials", dir, "directory of trial_*.csv")->required();
    trn->add_option("--split-seed", o.split_seed)->capture_default_str();
    trn->add_option("--model", model_path)->required();
    trn->callback([&] {
        const auto split = load_split(dir, o.split_seed);
        const auto model = fit(split.train, o.chaos(), parse_normalization(o.normalization));
        save_chaosnet(model_path, model);
        auto m = base_manifest("train", trn);
        m["neurochaos"] = to_json(o.chaos());
        m["train_instances"] = split.train.size();
        write_manifest(manifest_path_for(model_path), m);
    });

    auto* ev = app.add_subcommand("evaluate", "evaluate a ChaosNet model on the test split");
    ev->add_option("--trials", dir)->required();
    ev->add_option("--split-seed", o.split_seed)->capture_default_str();
    ev->add_option("--model", model_path)->required()->check(CLI::ExistingFile);
    ev->add_option("--out", out)->required();
    ev->callback([&] {
        const auto split = load_split(dir, o.split_seed);
        const auto r = evaluate(load_chaosnet(model_path), split.test);
        export_results(report_table(r, "chaosnet"), out, base_manifest("evaluate", ev));
        std::cout << "macro_f1 " << format_double(r.macro_f1) << '\n';
    });

    // mlp
    auto* mtrn = app.add_subcommand("mlp-train", "train the baseline MLP on the training split");
    add_mlp(mtrn, o);
    mtrn->add_option("--normalization", o.normalization)->capture_default_str();
    mtrn->add_option("--trials", dir)->required();
    mtrn->add_option("--split-seed", o.split_seed)->capture_default_str();
    mtrn->add_option("--model", model_path)->required();
    mtrn->callback([&] {
        const auto split = load_split(dir, o.split_seed);
        const auto cfg = o.experiment();
        if (cfg.norm != normalization_mode::per_instance)
            throw config_error("mlp-train: only per_instance normalization can be stored with the model");
        const auto clf = train_classifier(method_kind::mlp, split.train, cfg);
        save(*clf.mlp, model_path);
        auto m = base_manifest("mlp-train", mtrn);
        m["architecture"] = clf.mlp->arch.layers;
        write_manifest(manifest_path_for(model_path), m);
    });

    auto* meval = app.add_subcommand("mlp-eval", "evaluate a saved MLP on the test split");
    meval->add_option("--trials", dir)->required();
    meval->add_option("--split-seed", o.split_seed)->capture_default_str();
    meval->add_option("--model", model_path)->required()->check(CLI::ExistingFile);
    meval->add_option("--out", out)->required();
    meval->callback([&] {
        const auto split = load_split(dir, o.split_seed);
        const auto net = load_mlp<float>(model_path);
        const auto scaled = normalized(split.test, normalization{});
        const auto pred = predict_all(net, std::span<const std::vector<double>>(scaled.instances));
        const auto r = evaluate_predictions(split.test.labels, pred, 2);
        export_results(report_table(r, "mlp"), out, base_manifest("mlp-eval", meval));
        std::cout << "macro_f1 " << format_double(r.macro_f1) << '\n';
    });

    auto* mact = app.add_subcommand("mlp-activations", "hidden-layer activations of a saved MLP for one series");
    mact->add_option("--model", model_path)->required()->check(CLI::ExistingFile);
    mact->add_option("--input", input)->required()->check(CLI::ExistingFile);
    mact->add_option("--column", column)->capture_default_str();
    mact->add_option("--hidden-layer", o.hidden_layer)->capture_default_str();
    mact->add_option("--out", out)->required();
    mact->callback([&] {
        const auto net = load_mlp<float>(model_path);
        const auto h = hidden_activations(net, normalization{}.apply(load_column(input, column)), o.hidden_layer);
        csv_table t{{"unit", "activation"}, {}};
        for (std::size_t i = 0; i < h.size(); ++i) t.rows.push_back({std::to_string(i), format_double(h[i])});
        export_results(t, out, base_manifest("mlp-activations", mact));
    });

    // causality
    auto* gcc = app.add_subcommand("gc", "Granger causality on a master/slave file or over an eta sweep");
    add_system(gcc, o);
    add_grid(gcc, o);
    add_chaos(gcc, o);
    add_mlp(gcc, o);
    add_gc(gcc, o);
    gcc->add_option("--input", input, "CSV with master,slave columns; omit to run the sweep");
    gcc->add_option("--source", source, "sweep features: firing_time or mlp_hidden")->capture_default_str();
    gcc->add_option("--per-eta", per_eta, "trials per eta in sweep mode")->capture_default_str();
    gcc->add_option("--out", out)->required();
    gcc->callback([&] {
        auto m = base_manifest("gc", gcc);
        if (!input.empty()) {
            const auto p = read_pair_csv(input);
            const gc_config cfg{o.max_order, o.alpha};
            csv_table t{{"direction", "order", "samples", "f_statistic", "p_value", "significant"}, {}};
            for (auto [name, x, y] : {std::tuple{"master_to_slave", &p.master, &p.slave},
                                      std::tuple{"slave_to_master", &p.slave, &p.master}}) {
                const auto r = granger(*x, *y, cfg);
                t.rows.push_back({name, std::to_string(r.order), std::to_string(r.samples),
                                  format_double(r.f_statistic), format_double(r.p_value), r.significant ? "1" : "0"});
            }
            export_results(t, out, m);
            return;
        }
        if (source == "raw") source = "firing_time";
        const auto cfg = o.experiment();
        const auto res = run_gc_experiment(parse_causality_source(source), cfg, per_eta);
        m["experiment"] = to_json(cfg);
        m["trials_per_eta"] = per_eta;
        export_results(to_table(res.rows), out, m, res.failures);
    });

    auto* cc = app.add_subcommand("ccc", "compression-complexity causality on a file or over an eta sweep");
    add_system(cc, o);
    add_grid(cc, o);
    add_chaos(cc, o);
    add_ccc(cc, o);
    cc->add_option("--input", input, "CSV with master,slave columns; omit to run the sweep");
    cc->add_option("--source", source, "raw or firing_time")->capture_default_str();
    cc->add_option("--per-eta", per_eta, "trials per eta in sweep mode")->capture_default_str();
    cc->add_option("--out", out)->required();
    cc->callback([&] {
        auto m = base_manifest("ccc", cc);
        const auto cfg = o.experiment();
        if (!input.empty()) {
            auto p = read_pair_csv(input);
            if (parse_causality_source(source) == causality_source::chaosfex_firing_time) {
                const gls_neuron n(cfg.chaos);
                p = {firing_time_series(normalization{}.apply(p.master), n),
                     firing_time_series(normalization{}.apply(p.slave), n), p.tag};
            }
            csv_table t{{"direction", "ccc"}, {}};
            t.rows.push_back({"master_to_slave", format_double(ccc(p.master, p.slave, cfg.ccc))});
            t.rows.push_back({"slave_to_master", format_double(ccc(p.slave, p.master, cfg.ccc))});
            export_results(t, out, m);
            return;
        }
        const auto res = run_ccc_experiment(parse_causality_source(source), cfg, per_eta);
        m["experiment"] = to_json(cfg);
        m["trials_per_eta"] = per_eta;
        export_results(to_table(res.rows), out, m, res.failures);
    });

    // experiments
    auto* sw = app.add_subcommand("sweep", "classification macro F1 against eta");
    add_system(sw, o);
    add_grid(sw, o);
    add_chaos(sw, o);
    add_mlp(sw, o);
    sw->add_option("--method", method, "chaosnet or mlp")->capture_default_str();
    sw->add_option("--out", out)->required();
    sw->callback([&] {
        const auto cfg = o.experiment();
        const auto res = run_eta_sweep(cfg, parse_method(method));
        auto m = base_manifest("sweep", sw);
        m["experiment"] = to_json(cfg);
        m["method"] = method;
        export_results(to_table(res.rows), out, m, res.failures);
    });

    auto* tr = app.add_subcommand("transfer", "train on one coupled system, test on another");
    add_system(tr, o);
    add_grid(tr, o);
    add_chaos(tr, o);
    add_mlp(tr, o);
    tr->add_option("--cases", cases, "comma-separated subset of I,II,III,IV")->capture_default_str();
    tr->add_option("--methods", methods, "comma-separated subset of chaosnet,mlp")->capture_default_str();
    tr->add_option("--out", out)->required();
    tr->callback([&] {
        std::vector<transfer_case> cs;
        for (const auto& c : detail::split_csv_line(cases)) cs.push_back(parse_transfer_case(c));
        std::vector<method_kind> ms;
        for (const auto& s : detail::split_csv_line(methods)) ms.push_back(parse_method(s));
        const auto cfg = o.experiment();
        const auto res = run_transfer(cs, ms, cfg);
        auto m = base_manifest("transfer", tr);
        m["experiment"] = to_json(cfg);
        export_results(to_table(res.rows), out, m, res.failures);
    });

    auto* pp = app.add_subcommand("prey-predator", "CCC on the prey-predator series (time,prey,predator CSV)");
    pp->add_option("--input", input)->required()->check(CLI::ExistingFile);
    pp->add_option("--out", out)->required();
    pp->callback([&] {
        const prey_predator_config cfg;
        const auto rows = run_prey_predator(load_prey_predator(input), cfg);
        auto m = base_manifest("prey-predator", pp);
        m["raw_ccc"] = {{"L", cfg.raw.L}, {"w", cfg.raw.w}, {"delta", cfg.raw.delta}, {"B", cfg.raw.B}};
        m["firing_time_ccc"] = {{"L", cfg.firing_time.L},
                                {"w", cfg.firing_time.w},
                                {"delta", cfg.firing_time.delta},
                                {"B", cfg.firing_time.B}};
        m["neurochaos"] = to_json(cfg.chaos);
        export_results(to_table(rows), out, m);
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const ncl::error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "unexpected error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
