#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "lssboost/artifacts.hpp"
#include "lssboost/boost.hpp"
#include "lssboost/csv.hpp"
#include "lssboost/diagnostics.hpp"
#include "lssboost/error.hpp"
#include "lssboost/model_config.hpp"
#include "lssboost/oracle.hpp"
#include "lssboost/simgen.hpp"
#include "lssboost/tuning.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace lssboost;

namespace {

struct Options {
    std::string config;
    std::string out;
    std::string fit_dir;
    int jobs = 1;
    std::optional<std::uint64_t> seed;
};

class Outputs {
public:
    explicit Outputs(fs::path dir) : dir_(std::move(dir)) { fs::create_directories(dir_); }

    fs::path add(const std::string& name) {
        names_.push_back(name);
        return dir_ / name;
    }

    void write_json(const std::string& name, const json& value) {
        std::ofstream out(add(name));
        out << value.dump(2) << '\n';
    }

    void finish(const std::string& command, const RunConfig& config) {
        std::ofstream out(dir_ / "manifest.json");
        out << make_manifest(command, config, names_).dump(2) << '\n';
    }

    const fs::path& dir() const { return dir_; }

private:
    fs::path dir_;
    std::vector<std::string> names_;
};

std::string file_safe(const std::string& label) {
    std::string s;
    for (char c : label) s += std::isalnum(static_cast<unsigned char>(c)) ? c : '_';
    while (!s.empty() && s.back() == '_') s.pop_back();
    return s;
}

RunConfig load(const Options& opt) {
    RunConfig cfg = load_config(opt.config);
    if (opt.seed) {
        cfg.source["seed"] = *opt.seed;
        cfg = parse_config(cfg.source, fs::path(opt.config).parent_path());
    }
    return cfg;
}

void require_model(const RunConfig& cfg) {
    if (cfg.model.parameters.empty()) throw ConfigError("config has no formula");
    if (cfg.data.table.empty()) throw ConfigError("config has no data.table");
}

void write_fit(Outputs& out, const Family& family, const BuiltModel& model, const FitState& fit) {
    write_coefficients(out.add("coefficients.csv"), family, model, fit);
    write_selection_log(out.add("selections.csv"), family, model, fit);
    for (int q = 0; q < model.num_parameters(); ++q) {
        for (std::size_t j = 0; j < model.terms[q].size(); ++j) {
            const auto& term = *model.terms[q][j];
            if (!term.has_coefficient_function()) continue;
            const auto label = term.label();
            const Grid& grid = term.grid();
            write_coefficient_curve(
                out.add("curve_" + family.parameter_name(q) + "_" + file_safe(label) + ".csv"),
                grid, extract_coefficient_function(model, fit, q, label, grid));
        }
    }
    if (!fit.risk_trace.empty()) {
        Table t;
        Eigen::VectorXd step(static_cast<Eigen::Index>(fit.risk_trace.size()));
        for (Eigen::Index k = 0; k < step.size(); ++k) step(k) = static_cast<double>(k);
        t.add("update", step);
        t.add("risk", Eigen::Map<const Eigen::VectorXd>(fit.risk_trace.data(), step.size()));
        write_table_csv(out.add("risk_trace.csv"), t);
    }
}

FitState fit_at(const Family& family, const Dataset& data, const BuiltModel& model,
                const RunConfig& cfg, const std::vector<int>& mstop) {
    BoostConfig bc;
    bc.step_lengths = cfg.step_lengths;
    bc.mstop = mstop;
    bc.track_risk = true;
    return boost_fit(family, data.response, model.blocks, bc);
}

int cmd_fit(const Options& opt) {
    const RunConfig cfg = load(opt);
    require_model(cfg);
    if (cfg.mstop.empty()) throw ConfigError("fit needs boost.mstop");
    const auto family = make_family(cfg.family);
    const Dataset data = load_dataset(cfg.data, cfg.lags);
    const BuiltModel model = build_model(cfg.model, data);
    Outputs out(opt.out);
    write_fit(out, *family, model, fit_at(*family, data, model, cfg, cfg.mstop));
    out.finish("fit", cfg);
    return 0;
}

int cmd_cv(const Options& opt) {
    const RunConfig cfg = load(opt);
    require_model(cfg);
    if (cfg.tuning.grid_max.empty()) throw ConfigError("cv needs tuning.grid_max");
    const auto family = make_family(cfg.family);
    const Dataset data = load_dataset(cfg.data, cfg.lags);
    const BuiltModel model = build_model(cfg.model, data);
    const StopGrid grid = make_stop_grid(cfg.tuning.grid_max, cfg.tuning.length_out);
    const FoldWeights folds =
        cfg.tuning.method == TuningConfig::Method::cv
            ? cv_fold_weights(data.size(), cfg.tuning.folds, cfg.seed)
            : block_bootstrap_weights(data.size(), cfg.tuning.replicates, cfg.tuning.block_length,
                                      cfg.seed, cfg.tuning.scheme);
    const RiskSurface surface =
        cv_risk(*family, data.response, model.blocks, cfg.step_lengths, grid, folds, opt.jobs);
    Outputs out(opt.out);
    write_risk_surface(out.add("risk_surface.csv"), *family, surface);
    json best;
    for (int q = 0; q < family->num_parameters(); ++q) {
        best[family->parameter_name(q)] = surface.best[q];
    }
    out.write_json("selected.json", json{{"mstop", best},
                                         {"mean_risk", surface.mean_risk(static_cast<Eigen::Index>(
                                                           surface.best_index))},
                                         {"skipped_folds", surface.skipped_folds}});
    write_fit(out, *family, model, fit_at(*family, data, model, cfg, surface.best));
    out.finish("cv", cfg);
    return 0;
}

int cmd_simulate(const Options& opt) {
    const RunConfig cfg = load(opt);
    const SimulateConfig& sim = cfg.simulate;
    Outputs out(opt.out);
    if (sim.kind == SimulateConfig::Kind::arch) {
        Table t;
        t.add("y", gen_arch_series(sim.arch));
        write_table_csv(out.add("series.csv"), t);
        out.finish("simulate", cfg);
        return 0;
    }
    StudyDesign design;
    design.scenario = sim.scenario;
    design.mu_shapes = sim.shapes[0];
    design.sigma_shapes = sim.shapes[1];
    design.mu_intercept = sim.intercepts[0];
    design.sigma_intercept = sim.intercepts[1];
    auto generate = [&](const std::string& suffix, Eigen::Index N, std::uint64_t seed) {
        const StudySample s = simulate_study(design, N, seed);
        for (std::size_t j = 0; j < s.covariates.size(); ++j) {
            write_functional_csv(out.add("x" + std::to_string(j + 1) + suffix + ".csv"),
                                 {s.covariates[j].grid, s.covariates[j].values});
        }
        Table data;
        data.add("y", s.response.y);
        write_table_csv(out.add("data" + suffix + ".csv"), data);
        Table truth;
        truth.add("mu", s.response.truth.parameters[0]);
        truth.add("sigma", s.response.truth.parameters[1]);
        write_table_csv(out.add("truth_params" + suffix + ".csv"), truth);
        if (suffix.empty()) {
            Table curves;
            curves.add("s", s.covariates[0].grid.points());
            for (std::size_t j = 0; j < s.covariates.size(); ++j) {
                curves.add("mu_x" + std::to_string(j + 1), s.mu.curves[j]);
                curves.add("sigma_x" + std::to_string(j + 1), s.log_sigma.curves[j]);
            }
            write_table_csv(out.add("truth_curves.csv"), curves);
        }
    };
    generate("", sim.scenario.N, cfg.seed);
    if (sim.test_N > 0) generate("_test", sim.test_N, cfg.seed + kTestSeedOffset);
    out.finish("simulate", cfg);
    return 0;
}

json residual_report(Outputs& out, const std::string& prefix, const Family& family,
                     const Dataset& data, const ParamVector& params, int acf_lags) {
    const Eigen::VectorXd res = quantile_residuals(family, data.response, params);
    const Eigen::VectorXd pit = pit_values(family, data.response, params);
    Table r;
    r.add("residual", res);
    r.add("pit", pit);
    write_table_csv(out.add(prefix + "residuals.csv"), r);
    const QQData qq = qq_normal(res);
    Table q;
    q.add("theoretical", qq.theoretical);
    q.add("sample", qq.sample);
    write_table_csv(out.add(prefix + "qq.csv"), q);
    const int lags = std::min<int>(acf_lags, static_cast<int>(res.size()) - 1);
    const Eigen::VectorXd a = acf(res, lags);
    const Eigen::VectorXd a2 = acf(res.array().square().matrix(), lags);
    Table t;
    t.add("lag", Eigen::VectorXd::LinSpaced(lags, 1, lags));
    t.add("acf", a);
    t.add("acf_squared", a2);
    t.add("band", Eigen::VectorXd::Constant(lags, acf_band(res.size())));
    write_table_csv(out.add(prefix + "acf.csv"), t);
    return json{{"global_deviance", global_deviance(family, data.response, params)},
                {"ks_statistic", ks_statistic_normal(res)},
                {"n", res.size()}};
}

int cmd_diagnose(const Options& opt) {
    const RunConfig cfg = load(opt);
    require_model(cfg);
    const auto family = make_family(cfg.family);
    const Dataset data = load_dataset(cfg.data, cfg.lags);
    const BuiltModel model = build_model(cfg.model, data);
    const fs::path fit_dir = opt.fit_dir.empty() ? fs::path(opt.out) : fs::path(opt.fit_dir);
    const FitState fit = read_coefficients(fit_dir / "coefficients.csv", *family, model);
    Outputs out(opt.out);
    json summary;
    summary["train"] = residual_report(out, "train_", *family, data,
                                       predict(*family, fit, model, data), cfg.diagnose.acf_lags);
    if (cfg.diagnose.test) {
        const Dataset test = load_dataset(*cfg.diagnose.test, cfg.lags);
        summary["test"] = residual_report(out, "test_", *family, test,
                                          predict(*family, fit, model, test), cfg.diagnose.acf_lags);
    }
    if (cfg.diagnose.rolling > 0) {
        if (cfg.mstop.empty()) throw ConfigError("rolling refits need boost.mstop");
        const Eigen::Index n = data.size();
        const Eigen::Index first = n - cfg.diagnose.rolling;
        if (first < 10) throw ConfigError("diagnose.rolling leaves fewer than 10 training rows");
        Eigen::VectorXd contrib(cfg.diagnose.rolling);
        for (Eigen::Index i = first; i < n; ++i) {
            const Dataset past = data.slice(0, i);
            const Dataset next = data.slice(i, i + 1);
            const BuiltModel m = build_model(cfg.model, past);
            const FitState f = fit_at(*family, past, m, cfg, cfg.mstop);
            contrib(i - first) = global_deviance(*family, next.response, predict(*family, f, m, next));
        }
        Table t;
        t.add("row", Eigen::VectorXd::LinSpaced(cfg.diagnose.rolling, static_cast<double>(first),
                                                static_cast<double>(n - 1)));
        t.add("deviance", contrib);
        write_table_csv(out.add("rolling_deviance.csv"), t);
        summary["rolling_global_deviance"] = contrib.sum();
    }
    summary["quantile_clamps"] = quantile_clamp_activations();
    out.write_json("diagnostics.json", summary);
    out.finish("diagnose", cfg);
    return 0;
}

int cmd_oracle(const Options& opt) {
    const RunConfig cfg = load(opt);
    require_model(cfg);
    const auto family = make_family(cfg.family);
    if (family->name() != "normal-ls") {
        throw ConfigError("oracle supports the normal-ls family only");
    }
    const Dataset data = load_dataset(cfg.data, cfg.lags);
    const BuiltModel model = build_model(cfg.model, data);
    const Eigen::VectorXd w = Eigen::VectorXd::Ones(data.size());
    const auto offsets = initialize_offsets(*family, data.response, w);
    const OracleResult r = newton_fit_gaussian_ls(model.blocks, data.response, offsets);
    FitState fit;
    fit.offsets = offsets;
    fit.coefficients = r.coefficients;
    Outputs out(opt.out);
    write_coefficients(out.add("coefficients.csv"), *family, model, fit);
    out.write_json("oracle.json", json{{"converged", r.converged},
                                       {"iterations", r.iterations},
                                       {"score_norm", r.score_norm},
                                       {"penalized_loglik", r.penalized_loglik.empty()
                                                                ? json(nullptr)
                                                                : json(r.penalized_loglik.back())}});
    out.finish("oracle", cfg);
    if (!r.converged) throw NumericalError("oracle did not converge");
    return 0;
}

const char* category_name(ErrorCategory c) {
    switch (c) {
        case ErrorCategory::config: return "config";
        case ErrorCategory::data: return "data";
        case ErrorCategory::numerical: return "numerical";
    }
    return "unknown";
}

std::string one_line(std::string s) {
    for (char& c : s) {
        if (c == '\n' || c == '\r') c = ' ';
    }
    return s;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Component-wise gradient boosting for distributional regression"};
    app.require_subcommand(1);
    Options opt;
    const char* env_out = std::getenv("LSSBOOST_OUT");
    opt.out = env_out ? env_out : "lssboost-out";

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("-c,--config", opt.config, "JSON config")->required()->check(CLI::ExistingFile);
        sub->add_option("-o,--out", opt.out, "output directory (default $LSSBOOST_OUT)");
        sub->add_option("--seed", opt.seed, "override the config seed");
    };
    std::vector<std::pair<CLI::App*, int (*)(const Options&)>> commands;
    auto* fit = app.add_subcommand("fit", "boost at the configured stopping iterations");
    add_common(fit);
    commands.emplace_back(fit, cmd_fit);
    auto* cv = app.add_subcommand("cv", "grid search of stopping iterations, then refit");
    add_common(cv);
    cv->add_option("-j,--jobs", opt.jobs, "folds evaluated concurrently")->check(CLI::PositiveNumber);
    commands.emplace_back(cv, cmd_cv);
    auto* sim = app.add_subcommand("simulate", "generate covariates and responses");
    add_common(sim);
    commands.emplace_back(sim, cmd_simulate);
    auto* diag = app.add_subcommand("diagnose", "quantile residuals, deviance and rolling refits");
    add_common(diag);
    diag->add_option("--fit", opt.fit_dir, "directory holding coefficients.csv (default --out)");
    commands.emplace_back(diag, cmd_diagnose);
    auto* oracle = app.add_subcommand("oracle", "penalized maximum likelihood fit");
    add_common(oracle);
    commands.emplace_back(oracle, cmd_oracle);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error category=config reason=" << one_line(e.what()) << '\n';
        return 1;
    }
    try {
        for (const auto& [sub, run] : commands) {
            if (sub->parsed()) return run(opt);
        }
    } catch (const Error& e) {
        std::cerr << "error category=" << category_name(e.category())
                  << " reason=" << one_line(e.what()) << '\n';
        return static_cast<int>(e.category());
    } catch (const fs::filesystem_error& e) {
        std::cerr << "error category=data reason=" << one_line(e.what()) << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error category=numerical reason=" << one_line(e.what()) << '\n';
        return 3;
    }
    return 1;
}
