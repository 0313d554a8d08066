#include "lssboost/model_config.hpp"

#include <cstdio>
#include <fstream>

#include "lssboost/csv.hpp"
#include "lssboost/error.hpp"
#include "lssboost/family.hpp"

namespace lssboost {

using nlohmann::json;

namespace {

template <typename T>
T get_or(const json& obj, const char* key, T fallback) {
    if (!obj.contains(key)) return fallback;
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config key '") + key + "': " + e.what());
    }
}

const json& require(const json& obj, const char* key) {
    if (!obj.is_object() || !obj.contains(key)) {
        throw ConfigError(std::string("config is missing '") + key + "'");
    }
    return obj.at(key);
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
    std::filesystem::path path(p);
    return path.is_absolute() ? path : base / path;
}

DataSource parse_source(const json& obj, const std::filesystem::path& base) {
    DataSource src;
    src.table = resolve(base, require(obj, "table").get<std::string>());
    src.response = get_or<std::string>(obj, "response", "y");
    if (obj.contains("functional")) {
        for (const auto& [name, path] : obj.at("functional").items()) {
            src.functional[name] = resolve(base, path.get<std::string>());
        }
    }
    return src;
}

LagTransform parse_lag_transform(const std::string& name) {
    if (name == "identity") return LagTransform::identity;
    if (name == "log_square") return LagTransform::log_square;
    throw ConfigError("unknown lag transform '" + name + "'");
}

std::vector<TermSpec> parse_formula(const json& terms, std::vector<LagRequest>& lags) {
    if (!terms.is_array()) throw ConfigError("formula entries must be arrays of terms");
    std::vector<TermSpec> out;
    for (const auto& t : terms) {
        const auto kind = require(t, "term").get<std::string>();
        TermSpec spec;
        spec.label = get_or<std::string>(t, "label", "");
        if (t.contains("df")) spec.df = t.at("df").get<double>();
        if (t.contains("lambda")) spec.lambda = t.at("lambda").get<double>();
        if (kind == "intercept") {
            spec.kind = TermKind::intercept;
        } else if (kind == "linear") {
            spec.kind = TermKind::linear;
            spec.variable = require(t, "var").get<std::string>();
        } else if (kind == "signal" || kind == "interaction") {
            spec.kind = kind == "signal" ? TermKind::signal : TermKind::interaction;
            spec.variable = require(t, "var").get<std::string>();
            const auto basis = get_or<std::string>(t, "basis", "pspline");
            if (basis == "pspline") {
                spec.basis = SignalBasis::pspline;
            } else if (basis == "fpc") {
                spec.basis = SignalBasis::fpc;
            } else {
                throw ConfigError("unknown signal basis '" + basis + "'");
            }
            spec.K = get_or(t, "K", spec.K);
            spec.degree = get_or(t, "degree", spec.degree);
            spec.penalty_order = get_or(t, "penalty_order", spec.penalty_order);
            spec.pve = get_or(t, "pve", spec.pve);
            const auto fpen = get_or<std::string>(t, "fpc_penalty", "identity");
            if (fpen == "identity") {
                spec.fpc_penalty = FpcPenalty::identity;
            } else if (fpen == "inverse_eigenvalue") {
                spec.fpc_penalty = FpcPenalty::inverse_eigenvalue;
            } else {
                throw ConfigError("unknown fpc penalty '" + fpen + "'");
            }
            if (spec.kind == TermKind::interaction) {
                spec.by = require(t, "by").get<std::string>();
                spec.by_K = get_or(t, "by_K", spec.by_K);
                spec.by_lambda_ratio = get_or(t, "by_lambda_ratio", spec.by_lambda_ratio);
            }
        } else if (kind == "lag") {
            LagRequest lag;
            lag.variable = require(t, "var").get<std::string>();
            lag.order = require(t, "p").get<int>();
            lag.transform = parse_lag_transform(get_or<std::string>(t, "transform", "identity"));
            if (lag.order < 1) throw ConfigError("lag order must be at least 1");
            bool merged = false;
            for (auto& existing : lags) {
                if (existing.variable == lag.variable && existing.transform == lag.transform) {
                    existing.order = std::max(existing.order, lag.order);
                    merged = true;
                }
            }
            if (!merged) lags.push_back(lag);
            for (int j = 1; j <= lag.order; ++j) {
                TermSpec col;
                col.kind = TermKind::linear;
                col.variable = lag_column_name(lag.variable, j, lag.transform);
                col.df = spec.df;
                col.lambda = spec.lambda;
                out.push_back(col);
            }
            continue;
        } else {
            throw ConfigError("unknown term '" + kind + "'");
        }
        out.push_back(spec);
    }
    return out;
}

void parse_tuning(const json& obj, TuningConfig& tuning) {
    const auto method = get_or<std::string>(obj, "method", "cv");
    if (method == "cv") {
        tuning.method = TuningConfig::Method::cv;
    } else if (method == "bootstrap") {
        tuning.method = TuningConfig::Method::bootstrap;
    } else {
        throw ConfigError("unknown tuning method '" + method + "'");
    }
    tuning.folds = get_or(obj, "folds", tuning.folds);
    tuning.replicates = get_or(obj, "B", tuning.replicates);
    tuning.block_length = get_or(obj, "block_length", tuning.block_length);
    const auto scheme = get_or<std::string>(obj, "scheme", "moving");
    if (scheme == "moving") {
        tuning.scheme = BlockScheme::moving;
    } else if (scheme == "non_overlapping") {
        tuning.scheme = BlockScheme::non_overlapping;
    } else {
        throw ConfigError("unknown block scheme '" + scheme + "'");
    }
    tuning.grid_max = get_or(obj, "grid_max", tuning.grid_max);
    tuning.length_out = get_or(obj, "length_out", tuning.length_out);
}

void parse_simulate(const json& obj, SimulateConfig& sim, std::uint64_t seed) {
    const auto kind = get_or<std::string>(obj, "kind", "functional");
    if (kind == "functional") {
        sim.kind = SimulateConfig::Kind::functional;
    } else if (kind == "arch") {
        sim.kind = SimulateConfig::Kind::arch;
    } else {
        throw ConfigError("unknown simulation kind '" + kind + "'");
    }
    sim.scenario.N = get_or<Eigen::Index>(obj, "N", sim.scenario.N);
    sim.scenario.R = get_or<Eigen::Index>(obj, "R", sim.scenario.R);
    sim.scenario.regime = parse_regime(get_or<std::string>(obj, "regime", "const"));
    sim.scenario.rand_start = get_or(obj, "rand_start", false);
    sim.scenario.seed = seed;
    sim.test_N = get_or<Eigen::Index>(obj, "test_N", 0);
    if (obj.contains("shapes")) {
        const auto& s = obj.at("shapes");
        sim.shapes = {get_or<std::vector<std::string>>(s, "mu", {}),
                      get_or<std::vector<std::string>>(s, "sigma", {})};
        if (sim.shapes[0].size() != sim.shapes[1].size()) {
            throw ConfigError("shapes for mu and sigma must name the same covariates");
        }
    }
    if (obj.contains("intercepts")) {
        const auto& s = obj.at("intercepts");
        sim.intercepts = {get_or(s, "mu", 0.0), get_or(s, "sigma", 0.0)};
    }
    sim.arch.N = sim.scenario.N;
    sim.arch.alpha = get_or(obj, "alpha", sim.arch.alpha);
    sim.arch.beta = get_or(obj, "beta", sim.arch.beta);
    sim.arch.burn_in = get_or<Eigen::Index>(obj, "burn_in", sim.arch.burn_in);
    sim.arch.seed = seed;
    const auto transform = get_or<std::string>(obj, "transform", "square");
    if (transform == "square") {
        sim.arch.transform = ArchLagTransform::square;
    } else if (transform == "log_square") {
        sim.arch.transform = ArchLagTransform::log_square;
    } else {
        throw ConfigError("unknown ARCH lag transform '" + transform + "'");
    }
}

}  // namespace

RunConfig parse_config(const json& source, const std::filesystem::path& base_dir) {
    if (!source.is_object()) throw ConfigError("config must be an object");
    RunConfig cfg;
    cfg.source = source;
    try {
        cfg.seed = get_or<std::uint64_t>(source, "seed", 1);
        cfg.family = get_or<std::string>(source, "family", "normal-ls");
        const auto family = make_family(cfg.family);
        const int Q = family->num_parameters();

        if (source.contains("data")) cfg.data = parse_source(source.at("data"), base_dir);

        if (source.contains("formula")) {
            const auto& formula = source.at("formula");
            cfg.model.parameters.resize(static_cast<std::size_t>(Q));
            for (const auto& [name, terms] : formula.items()) {
                int q = -1;
                for (int k = 0; k < Q; ++k) {
                    if (family->parameter_name(k) == name) q = k;
                }
                if (q < 0) {
                    throw ConfigError("family " + cfg.family + " has no parameter '" + name + "'");
                }
                cfg.model.parameters[static_cast<std::size_t>(q)] = parse_formula(terms, cfg.lags);
            }
            for (int q = 0; q < Q; ++q) {
                if (cfg.model.parameters[static_cast<std::size_t>(q)].empty()) {
                    cfg.model.parameters[static_cast<std::size_t>(q)].push_back(TermSpec{});
                }
            }
        }

        if (source.contains("boost")) {
            const auto& b = source.at("boost");
            cfg.step_lengths = get_or(b, "step", cfg.step_lengths);
            cfg.mstop = get_or(b, "mstop", cfg.mstop);
        }
        if (cfg.step_lengths.empty()) cfg.step_lengths = family->default_step_lengths();
        if (static_cast<int>(cfg.step_lengths.size()) != Q) {
            throw ConfigError("boost.step needs " + std::to_string(Q) + " entries");
        }
        if (!cfg.mstop.empty() && static_cast<int>(cfg.mstop.size()) != Q) {
            throw ConfigError("boost.mstop needs " + std::to_string(Q) + " entries");
        }

        if (source.contains("tuning")) parse_tuning(source.at("tuning"), cfg.tuning);
        if (!cfg.tuning.grid_max.empty() && static_cast<int>(cfg.tuning.grid_max.size()) != Q) {
            throw ConfigError("tuning.grid_max needs " + std::to_string(Q) + " entries");
        }
        if (source.contains("simulate")) parse_simulate(source.at("simulate"), cfg.simulate, cfg.seed);
        if (source.contains("diagnose")) {
            const auto& d = source.at("diagnose");
            if (d.contains("test")) cfg.diagnose.test = parse_source(d.at("test"), base_dir);
            cfg.diagnose.acf_lags = get_or(d, "acf_lags", cfg.diagnose.acf_lags);
            cfg.diagnose.rolling = get_or(d, "rolling", cfg.diagnose.rolling);
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed config: ") + e.what());
    }
    return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config " + path.string());
    json source;
    try {
        source = json::parse(in);
    } catch (const json::exception& e) {
        throw ConfigError("config " + path.string() + " is not valid JSON: " + e.what());
    }
    return parse_config(source, path.parent_path());
}

Dataset load_dataset(const DataSource& source, const std::vector<LagRequest>& lags) {
    const Table table = read_table_csv(source.table);
    Dataset data;
    data.response_name = source.response;
    data.response = table.column(source.response);
    for (std::size_t c = 0; c < table.names.size(); ++c) {
        if (table.names[c] != source.response) data.scalars[table.names[c]] = table.columns[c];
    }
    for (const auto& [name, path] : source.functional) {
        data.functionals.emplace(name, read_functional_csv(path));
    }
    data.validate();
    return lags.empty() ? data : with_lags(data, lags);
}

std::string config_hash(const json& source) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : source.dump()) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

json make_manifest(const std::string& command, const RunConfig& config,
                   const std::vector<std::string>& outputs) {
    return json{{"command", command},
                {"library_version", kLibraryVersion},
                {"seed", config.seed},
                {"config_hash", config_hash(config.source)},
                {"outputs", outputs},
                {"config", config.source}};
}

}  // namespace lssboost
