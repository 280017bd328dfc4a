#ifndef NCL_HARNESS_EXPERIMENTS_HPP
#define NCL_HARNESS_EXPERIMENTS_HPP

/** @file
 * Experiment drivers: classification sweeps over the coupling strength,
 * transfer between coupled systems, Granger and CCC studies, and the
 * prey-predator analysis. Every driver returns result rows plus a list of
 * failures; a failed unit of work never produces a row.
 */

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ncl/causality/ccc.hpp"
#include "ncl/causality/granger.hpp"
#include "ncl/chaosnet.hpp"
#include "ncl/harness/dataset.hpp"
#include "ncl/harness/io.hpp"
#include "ncl/harness/parallel.hpp"
#include "ncl/metrics.hpp"
#include "ncl/mlp.hpp"

namespace ncl {

enum class method_kind { chaosnet, mlp };

inline std::string to_string(method_kind m) { return m == method_kind::chaosnet ? "chaosnet" : "mlp"; }

inline method_kind parse_method(const std::string& s) {
    if (s == "chaosnet") return method_kind::chaosnet;
    if (s == "mlp") return method_kind::mlp;
    throw config_error("unknown method '" + s + "' (expected chaosnet or mlp)");
}

inline std::string to_string(normalization_mode m) {
    return m == normalization_mode::per_instance ? "per_instance" : "training_range";
}

inline normalization_mode parse_normalization(const std::string& s) {
    if (s == "per_instance") return normalization_mode::per_instance;
    if (s == "training_range") return normalization_mode::training_range;
    throw config_error("unknown normalization '" + s + "' (expected per_instance or training_range)");
}

/// Evenly spaced grid from `start` to `stop` inclusive, rounded to 1e-9.
inline std::vector<double> eta_grid(double start, double stop, double step) {
    if (!(step > 0.0) || stop < start) throw config_error("eta grid: need step > 0 and stop >= start");
    std::vector<double> g;
    const auto n = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
    for (std::size_t i = 0; i < n; ++i) g.push_back(std::round((start + step * static_cast<double>(i)) * 1e9) / 1e9);
    return g;
}

struct experiment_config {
    system_spec system = system_spec::tent(0.65, 0.47);
    std::vector<double> etas = eta_grid(0.0, 0.9, 0.1);
    std::size_t trials = 1000;
    /// Trials at grid index k are generated from base_seed + k.
    std::uint64_t base_seed = 0;
    std::uint64_t split_seed = 0;
    neurochaos_config chaos{};
    normalization_mode norm = normalization_mode::per_instance;
    training_config mlp{};
    std::uint64_t mlp_init_seed = 1;
    /// Hidden layer (1-based) read out for causality on learned features.
    std::size_t mlp_hidden_layer = 4;
    ccc_config ccc{};
    gc_config gc{};

    std::uint64_t seed_for(std::size_t eta_index) const { return base_seed + eta_index; }

    split_counts counts() const { return trials == 1000 ? split_counts{} : split_counts::scaled(trials); }
};

inline nlohmann::json to_json(const system_spec& s) {
    nlohmann::json j{{"kind", to_string(s.kind)}, {"length", s.length}, {"transient", s.transient}};
    switch (s.kind) {
    case system_kind::tent: j["b1"] = s.b1; j["b2"] = s.b2; break;
    case system_kind::logistic: j["A1"] = s.A1; j["A2"] = s.A2; break;
    case system_kind::ar: j["a1"] = s.a1; j["a2"] = s.a2; j["gamma"] = s.gamma; break;
    }
    return j;
}

inline nlohmann::json to_json(const experiment_config& c) {
    return {{"system", to_json(c.system)},
            {"etas", c.etas},
            {"trials", c.trials},
            {"base_seed", c.base_seed},
            {"split_seed", c.split_seed},
            {"neurochaos", to_json(c.chaos)},
            {"normalization", to_string(c.norm)},
            {"mlp",
             {{"epochs", c.mlp.epochs},
              {"batch_size", c.mlp.batch_size},
              {"learning_rate", c.mlp.learning_rate},
              {"beta1", c.mlp.beta1},
              {"beta2", c.mlp.beta2},
              {"adam_epsilon", c.mlp.adam_epsilon},
              {"shuffle_seed", c.mlp.seed},
              {"init_seed", c.mlp_init_seed},
              {"hidden_layer", c.mlp_hidden_layer}}},
            {"ccc", {{"L", c.ccc.L}, {"w", c.ccc.w}, {"delta", c.ccc.delta}, {"B", c.ccc.B}}},
            {"gc", {{"max_order", c.gc.max_order}, {"alpha", c.gc.alpha}}}};
}

struct run_failure {
    double eta = 0.0;
    std::uint64_t seed = 0;
    std::string what;
};

inline nlohmann::json to_json(const std::vector<run_failure>& fs) {
    auto arr = nlohmann::json::array();
    for (const auto& f : fs) arr.push_back({{"eta", f.eta}, {"seed", f.seed}, {"error", f.what}});
    return arr;
}

// --- classification ---------------------------------------------------------

struct result_row {
    double eta = 0.0;
    method_kind method = method_kind::chaosnet;
    double macro_f1 = 0.0;
    std::uint64_t seed = 0;
    /// Evaluation setting, e.g. "same" or a transfer case id.
    std::string setting = "same";
};

struct classification_result {
    std::vector<result_row> rows;
    std::vector<run_failure> failures;
};

inline labeled_set normalized(const labeled_set& data, const normalization& norm) {
    labeled_set out;
    for (std::size_t i = 0; i < data.size(); ++i) out.push_back(norm.apply(data.instances[i]), data.labels[i]);
    return out;
}

/// A trained classifier of either kind behind one predict call.
struct trained_classifier {
    method_kind method = method_kind::chaosnet;
    chaosnet_model chaosnet;
    normalization norm;
    std::optional<mlp_model<float>> mlp;

    double macro_f1(const labeled_set& test) const {
        if (method == method_kind::chaosnet) return evaluate(chaosnet, test).macro_f1;
        const auto scaled = normalized(test, norm);
        const auto pred = predict_all(*mlp, std::span<const std::vector<double>>(scaled.instances));
        return evaluate_predictions(test.labels, pred, 2).macro_f1;
    }
};

inline trained_classifier train_classifier(method_kind method, const labeled_set& train, const experiment_config& cfg) {
    trained_classifier c;
    c.method = method;
    if (method == method_kind::chaosnet) {
        c.chaosnet = fit(train, cfg.chaos, cfg.norm);
        return c;
    }
    c.norm = fit_normalization(train, cfg.norm);
    const auto scaled = normalized(train, c.norm);
    c.mlp.emplace(mlp_architecture::baseline(train.instances.front().size(), 2), cfg.mlp_init_seed);
    ncl::train(*c.mlp, std::span<const std::vector<double>>(scaled.instances), std::span<const int>(scaled.labels),
               cfg.mlp);
    return c;
}

/// For each eta: generate, split, fit and evaluate on the held-out split.
inline classification_result run_eta_sweep(const experiment_config& cfg, method_kind method) {
    classification_result out;
    for (std::size_t k = 0; k < cfg.etas.size(); ++k) {
        const double eta = cfg.etas[k];
        const auto seed = cfg.seed_for(k);
        try {
            const auto split = split_train_test(generate_trials(cfg.system, eta, cfg.trials, seed), cfg.split_seed,
                                                cfg.counts());
            const auto model = train_classifier(method, split.train, cfg);
            out.rows.push_back({eta, method, model.macro_f1(split.test), seed, "same"});
        } catch (const error& e) {
            out.failures.push_back({eta, seed, e.what()});
        }
    }
    return out;
}

enum class transfer_case { I, II, III, IV };

inline std::string to_string(transfer_case c) {
    switch (c) {
    case transfer_case::I: return "I";
    case transfer_case::II: return "II";
    case transfer_case::III: return "III";
    case transfer_case::IV: return "IV";
    }
    return "?";
}

inline transfer_case parse_transfer_case(const std::string& s) {
    if (s == "I") return transfer_case::I;
    if (s == "II") return transfer_case::II;
    if (s == "III") return transfer_case::III;
    if (s == "IV") return transfer_case::IV;
    throw config_error("unknown transfer case '" + s + "' (expected I, II, III or IV)");
}

/// The system the models are evaluated on for each case.
inline system_spec transfer_test_system(transfer_case c) {
    switch (c) {
    case transfer_case::I: return system_spec::tent(0.6, 0.4);
    case transfer_case::II: return system_spec::tent(0.1, 0.3);
    case transfer_case::III: return system_spec::tent(0.49, 0.52);
    case transfer_case::IV: return system_spec::logistic(4.0, 3.82);
    }
    throw config_error("unknown transfer case");
}

/**
 * Train on cfg.system and evaluate without refitting on each case's system.
 * Each model is trained once per eta and reused across cases. Test trials
 * come from derive_seed(seed, 1) and use the held-out side of the split;
 * the test systems take their length and transient from cfg.system.
 */
inline classification_result run_transfer(std::span<const transfer_case> cases, std::span<const method_kind> methods,
                                          const experiment_config& cfg) {
    if (cases.empty() || methods.empty()) throw config_error("transfer: need at least one case and one method");
    classification_result out;
    for (std::size_t k = 0; k < cfg.etas.size(); ++k) {
        const double eta = cfg.etas[k];
        const auto seed = cfg.seed_for(k);
        try {
            const auto train = split_train_test(generate_trials(cfg.system, eta, cfg.trials, seed), cfg.split_seed,
                                                cfg.counts())
                                   .train;
            std::vector<labeled_set> tests;
            for (auto c : cases) {
                auto sys = transfer_test_system(c);
                sys.length = cfg.system.length;
                sys.transient = cfg.system.transient;
                tests.push_back(split_train_test(generate_trials(sys, eta, cfg.trials,
                                                                 derive_seed(seed, 1)),
                                                 cfg.split_seed, cfg.counts())
                                    .test);
            }
            for (auto m : methods) {
                const auto model = train_classifier(m, train, cfg);
                for (std::size_t i = 0; i < cases.size(); ++i)
                    out.rows.push_back({eta, m, model.macro_f1(tests[i]), seed, to_string(cases[i])});
            }
        } catch (const error& e) {
            out.failures.push_back({eta, seed, e.what()});
        }
    }
    return out;
}

inline classification_result run_transfer_case(transfer_case c, std::span<const method_kind> methods,
                                               const experiment_config& cfg) {
    const transfer_case one[] = {c};
    return run_transfer(one, methods, cfg);
}

// --- causality --------------------------------------------------------------

enum class causality_source { raw, chaosfex_firing_time, mlp_hidden };

inline std::string to_string(causality_source s) {
    switch (s) {
    case causality_source::raw: return "raw";
    case causality_source::chaosfex_firing_time: return "firing_time";
    case causality_source::mlp_hidden: return "mlp_hidden";
    }
    return "?";
}

inline causality_source parse_causality_source(const std::string& s) {
    if (s == "raw") return causality_source::raw;
    if (s == "firing_time") return causality_source::chaosfex_firing_time;
    if (s == "mlp_hidden") return causality_source::mlp_hidden;
    throw config_error("unknown feature source '" + s + "' (expected raw, firing_time or mlp_hidden)");
}

/// Both-direction statistics for one eta, aggregated over successful trials.
struct causality_row {
    double eta = 0.0;
    std::string measure; // "gc" or "ccc"
    std::string source;
    std::size_t trials = 0;
    double mean_master_to_slave = 0.0, sd_master_to_slave = 0.0;
    double mean_slave_to_master = 0.0, sd_slave_to_master = 0.0;
    /// GC only: fraction of trials rejecting the null at alpha.
    double reject_master_to_slave = 0.0, reject_slave_to_master = 0.0;
    std::uint64_t seed = 0;
};

struct causality_result {
    std::vector<causality_row> rows;
    std::vector<run_failure> failures;
};

namespace detail {

struct direction_pair {
    double m2s = 0.0, s2m = 0.0;
    bool sig_m2s = false, sig_s2m = false;
};

inline void mean_sd(const std::vector<double>& v, double& mean, double& sd) {
    mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    sd = v.size() > 1 ? std::sqrt(ss / static_cast<double>(v.size() - 1)) : 0.0;
}

/// Ordered reduce of per-trial results; failed trials are reported, not averaged.
inline void aggregate(causality_result& out, double eta, std::uint64_t seed, const std::string& measure,
                      const std::string& source, const std::vector<std::optional<direction_pair>>& per_trial,
                      const std::vector<std::string>& errors) {
    std::vector<double> a, b;
    double ra = 0.0, rb = 0.0;
    for (std::size_t i = 0; i < per_trial.size(); ++i) {
        if (!per_trial[i]) {
            out.failures.push_back({eta, derive_seed(seed, i), "trial " + std::to_string(i) + ": " + errors[i]});
            continue;
        }
        a.push_back(per_trial[i]->m2s);
        b.push_back(per_trial[i]->s2m);
        ra += per_trial[i]->sig_m2s ? 1.0 : 0.0;
        rb += per_trial[i]->sig_s2m ? 1.0 : 0.0;
    }
    if (a.empty()) return;
    causality_row r;
    r.eta = eta;
    r.measure = measure;
    r.source = source;
    r.trials = a.size();
    mean_sd(a, r.mean_master_to_slave, r.sd_master_to_slave);
    mean_sd(b, r.mean_slave_to_master, r.sd_slave_to_master);
    r.reject_master_to_slave = ra / static_cast<double>(a.size());
    r.reject_slave_to_master = rb / static_cast<double>(a.size());
    r.seed = seed;
    out.rows.push_back(r);
}

inline time_series_pair firing_time_pair(const time_series_pair& p, const gls_neuron& neuron) {
    const normalization per_instance{};
    return {firing_time_series(per_instance.apply(p.master), neuron),
            firing_time_series(per_instance.apply(p.slave), neuron), p.tag};
}

} // namespace detail

/**
 * Granger causality in both directions, per trial, on firing-time series or
 * on hidden-layer activations of an MLP trained at the same eta.
 *
 * The MLP's training trials come from derive_seed(seed, 2). Hidden
 * activations are only as long as the layer is wide, so the maximum order is
 * clamped to what that length supports.
 */
inline causality_result run_gc_experiment(causality_source source, const experiment_config& cfg,
                                          std::size_t trials_per_eta = 50) {
    if (source == causality_source::raw) throw config_error("gc experiment: source must be firing_time or mlp_hidden");
    causality_result out;
    const gls_neuron neuron(cfg.chaos);
    for (std::size_t k = 0; k < cfg.etas.size(); ++k) {
        const double eta = cfg.etas[k];
        const auto seed = cfg.seed_for(k);
        std::optional<trained_classifier> net;
        try {
            if (source == causality_source::mlp_hidden) {
                const auto split = split_train_test(
                    generate_trials(cfg.system, eta, cfg.trials, derive_seed(seed, 2)), cfg.split_seed, cfg.counts());
                net = train_classifier(method_kind::mlp, split.train, cfg);
            }
        } catch (const error& e) {
            out.failures.push_back({eta, seed, e.what()});
            continue;
        }
        const auto trials = generate_trials(cfg.system, eta, trials_per_eta, seed);
        std::vector<std::optional<detail::direction_pair>> res(trials.size());
        std::vector<std::string> errs(trials.size());
        parallel_for(trials.size(), [&](std::size_t i) {
            try {
                time_series_pair f;
                if (source == causality_source::chaosfex_firing_time) {
                    f = detail::firing_time_pair(trials[i], neuron);
                } else {
                    const auto& n = *net;
                    f.master = hidden_activations(*n.mlp, n.norm.apply(trials[i].master), cfg.mlp_hidden_layer);
                    f.slave = hidden_activations(*n.mlp, n.norm.apply(trials[i].slave), cfg.mlp_hidden_layer);
                }
                gc_config gc = cfg.gc;
                gc.max_order = std::min(gc.max_order, max_feasible_order(f.master.size()));
                const auto ms = granger(f.master, f.slave, gc);
                const auto sm = granger(f.slave, f.master, gc);
                res[i] = detail::direction_pair{ms.f_statistic, sm.f_statistic, ms.significant, sm.significant};
            } catch (const error& e) {
                errs[i] = e.what();
            }
        });
        detail::aggregate(out, eta, seed, "gc", to_string(source), res, errs);
    }
    return out;
}

/// CCC in both directions on raw series or on firing-time series.
inline causality_result run_ccc_experiment(causality_source source, const experiment_config& cfg,
                                           std::size_t trials_per_eta = 50) {
    if (source == causality_source::mlp_hidden) throw config_error("ccc experiment: source must be raw or firing_time");
    validate(cfg.ccc);
    causality_result out;
    const gls_neuron neuron(cfg.chaos);
    for (std::size_t k = 0; k < cfg.etas.size(); ++k) {
        const double eta = cfg.etas[k];
        const auto seed = cfg.seed_for(k);
        const auto trials = generate_trials(cfg.system, eta, trials_per_eta, seed);
        std::vector<std::optional<detail::direction_pair>> res(trials.size());
        std::vector<std::string> errs(trials.size());
        parallel_for(trials.size(), [&](std::size_t i) {
            try {
                const auto f = source == causality_source::raw ? trials[i] : detail::firing_time_pair(trials[i], neuron);
                res[i] = detail::direction_pair{ccc(f.master, f.slave, cfg.ccc), ccc(f.slave, f.master, cfg.ccc)};
            } catch (const error& e) {
                errs[i] = e.what();
            }
        });
        detail::aggregate(out, eta, seed, "ccc", to_string(source), res, errs);
    }
    return out;
}

// --- prey-predator ----------------------------------------------------------

/// Expected row count of the standard series and the transient to drop.
inline constexpr std::size_t prey_predator_rows = 71;
inline constexpr std::size_t prey_predator_transient = 9;

/**
 * Reads `time,prey,predator` and drops the first nine rows. Master holds the
 * prey and slave the predator. A row count other than 71 is logged and the
 * file is used as is.
 */
inline time_series_pair load_prey_predator(const fs::path& path, std::ostream& log = std::clog) {
    const auto t = read_csv(path);
    for (const char* col : {"time", "prey", "predator"}) (void)t.column(col);
    auto prey = numeric_column(t, "prey", path.string());
    auto predator = numeric_column(t, "predator", path.string());
    if (prey.size() != prey_predator_rows)
        log << "warning: " << path.string() << " has " << prey.size() << " rows, expected " << prey_predator_rows
            << "; proceeding with the actual count\n";
    if (prey.size() <= prey_predator_transient)
        throw io_error(path.string() + ": needs more than " + std::to_string(prey_predator_transient) + " rows");
    const auto drop = static_cast<std::ptrdiff_t>(prey_predator_transient);
    return {{prey.begin() + drop, prey.end()}, {predator.begin() + drop, predator.end()}, "prey-predator"};
}

struct prey_predator_config {
    ccc_config raw{40, 15, 4, 8};
    ccc_config firing_time{40, 15, 4, 4};
    neurochaos_config chaos{0.56, 0.499, 0.1, 10000};
};

struct prey_predator_row {
    std::string source;
    double predator_to_prey = 0.0;
    double prey_to_predator = 0.0;
};

inline std::vector<prey_predator_row> run_prey_predator(const time_series_pair& data,
                                                        const prey_predator_config& cfg = {}) {
    const auto& prey = data.master;
    const auto& predator = data.slave;
    std::vector<prey_predator_row> rows;
    rows.push_back({"raw", ccc(predator, prey, cfg.raw), ccc(prey, predator, cfg.raw)});
    const auto f = detail::firing_time_pair(data, gls_neuron(cfg.chaos));
    rows.push_back({"firing_time", ccc(f.slave, f.master, cfg.firing_time), ccc(f.master, f.slave, cfg.firing_time)});
    return rows;
}

// --- export -----------------------------------------------------------------

inline csv_table to_table(const std::vector<result_row>& rows) {
    csv_table t{{"eta", "method", "setting", "macro_f1", "seed"}, {}};
    for (const auto& r : rows)
        t.rows.push_back({format_double(r.eta), to_string(r.method), r.setting, format_double(r.macro_f1),
                          std::to_string(r.seed)});
    return t;
}

inline csv_table to_table(const std::vector<causality_row>& rows) {
    csv_table t{{"eta", "measure", "source", "trials", "mean_master_to_slave", "sd_master_to_slave",
                 "mean_slave_to_master", "sd_slave_to_master", "reject_master_to_slave", "reject_slave_to_master",
                 "seed"},
                {}};
    for (const auto& r : rows)
        t.rows.push_back({format_double(r.eta), r.measure, r.source, std::to_string(r.trials),
                          format_double(r.mean_master_to_slave), format_double(r.sd_master_to_slave),
                          format_double(r.mean_slave_to_master), format_double(r.sd_slave_to_master),
                          format_double(r.reject_master_to_slave), format_double(r.reject_slave_to_master),
                          std::to_string(r.seed)});
    return t;
}

inline csv_table to_table(const std::vector<prey_predator_row>& rows) {
    csv_table t{{"source", "predator_to_prey", "prey_to_predator"}, {}};
    for (const auto& r : rows)
        t.rows.push_back({r.source, format_double(r.predator_to_prey), format_double(r.prey_to_predator)});
    return t;
}

/// Writes the CSV and its manifest sidecar; refuses an empty table.
inline void export_results(const csv_table& table, const fs::path& path, nlohmann::json manifest,
                           const std::vector<run_failure>& failures = {}) {
    if (table.rows.empty()) throw io_error("export_results: refusing to write an empty result table to " + path.string());
    write_csv(path, table);
    manifest["output"] = path.filename().string();
    manifest["columns"] = table.columns;
    manifest["rows"] = table.rows.size();
    manifest["failures"] = to_json(failures);
    write_manifest(manifest_path_for(path), manifest);
}

} // namespace ncl

#endif // NCL_HARNESS_EXPERIMENTS_HPP
