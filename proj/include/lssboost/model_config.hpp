#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "lssboost/dataset.hpp"
#include "lssboost/simgen.hpp"
#include "lssboost/terms.hpp"
#include "lssboost/tuning.hpp"

namespace lssboost {

inline constexpr const char* kLibraryVersion = "0.3.0";

struct DataSource {
    std::filesystem::path table;                             ///< scalar CSV, holds the response
    std::string response = "y";
    std::map<std::string, std::filesystem::path> functional; ///< name -> functional CSV
};

struct TuningConfig {
    enum class Method { cv, bootstrap } method = Method::cv;
    int folds = 5;
    int replicates = 100;
    int block_length = 20;
    BlockScheme scheme = BlockScheme::moving;
    std::vector<int> grid_max;  ///< per parameter
    int length_out = 8;
};

struct SimulateConfig {
    enum class Kind { functional, arch } kind = Kind::functional;
    SimScenario scenario;
    Eigen::Index test_N = 0;
    /// Shape name per covariate, one list per predictor (mu, log sigma).
    std::vector<std::vector<std::string>> shapes{{"coef1", "coef0"}, {"coef1", "coef0"}};
    std::vector<double> intercepts{0.0, 0.0};
    ArchSpec arch;
};

struct DiagnoseConfig {
    std::optional<DataSource> test;
    int acf_lags = 20;
    int rolling = 0;  ///< one-step-ahead refits over the last `rolling` rows
    int qq_points = 0;
};

/// Everything one CLI invocation needs, resolved against the config's directory.
struct RunConfig {
    nlohmann::json source;  ///< the config as read
    std::string family = "normal-ls";
    DataSource data;
    std::vector<LagRequest> lags;
    ModelSpec model;
    std::vector<double> step_lengths;  ///< empty means the family default
    std::vector<int> mstop;
    TuningConfig tuning;
    SimulateConfig simulate;
    DiagnoseConfig diagnose;
    std::uint64_t seed = 1;
};

/// Parses the nested config; relative paths are taken against `base_dir`.
/// Invalid or missing entries raise ConfigError.
RunConfig parse_config(const nlohmann::json& source, const std::filesystem::path& base_dir);
RunConfig load_config(const std::filesystem::path& path);

/// Reads the table and functional covariates, then adds the lag columns.
Dataset load_dataset(const DataSource& source, const std::vector<LagRequest>& lags);

/// 64-bit FNV-1a over the canonical dump of the config, as 16 hex digits.
std::string config_hash(const nlohmann::json& source);

/// Manifest written next to every output: command, seed, version, config hash and the config itself.
nlohmann::json make_manifest(const std::string& command, const RunConfig& config,
                             const std::vector<std::string>& outputs);

}  // namespace lssboost
