#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <string>

#include "json.hpp"

#include "lssboost/artifacts.hpp"
#include "lssboost/boost.hpp"
#include "lssboost/csv.hpp"
#include "lssboost/error.hpp"
#include "lssboost/family.hpp"
#include "lssboost/model_config.hpp"
#include "sim_case.hpp"
#include "support.hpp"

using namespace lssboost;
using lssboost::testing::max_abs_diff;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("lssboost_io_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path);
    out << text;
}

std::string read_text(const fs::path& path) {
    std::ifstream in(path);
    return std::string(std::istreambuf_iterator<char>(in), {});
}

nlohmann::json minimal_config() {
    return nlohmann::json::parse(R"({
      "family": "normal-ls",
      "seed": 7,
      "data": {"table": "d.csv", "response": "y", "functional": {"x1": "x1.csv"}},
      "formula": {
        "mu": [{"term": "intercept"},
               {"term": "signal", "var": "x1", "basis": "pspline", "K": 20, "penalty_order": 1, "df": 2}]
      },
      "boost": {"step": [0.1, 0.01], "mstop": [100, 50]}
    })");
}

}  // namespace

TEST(Csv, FormatDoubleRoundTrips) {
    Rng rng(11);
    for (int k = 0; k < 1000; ++k) {
        const double v = std::ldexp(rng.normal(), static_cast<int>(k % 80) - 40);
        EXPECT_EQ(parse_number(format_double(v), "x.csv", 1, 0), v);
    }
    EXPECT_EQ(std::stod(format_double(0.1)), 0.1);
    const double tiny = std::numeric_limits<double>::denorm_min();
    EXPECT_EQ(parse_number(format_double(tiny), "x.csv", 1, 0), tiny);
    EXPECT_EQ(std::stod(format_double(-1e300)), -1e300);
}

TEST(Csv, TableRoundTripIsExact) {
    const fs::path dir = scratch("table");
    Rng rng(12);
    Table t;
    t.add("y", lssboost::testing::random_vector(30, rng));
    t.add("z", lssboost::testing::random_vector(30, rng));
    write_table_csv(dir / "t.csv", t);
    const Table back = read_table_csv(dir / "t.csv");
    ASSERT_EQ(back.names, t.names);
    EXPECT_TRUE(back.column("y") == t.column("y"));
    EXPECT_TRUE(back.column("z") == t.column("z"));
    EXPECT_THROW(back.column("w"), ConfigError);
}

TEST(Csv, MissingOrInvalidCellsAreRejected) {
    const fs::path dir = scratch("bad");
    write_text(dir / "missing.csv", "y,z\n1,2\n3,\n");
    try {
        read_table_csv(dir / "missing.csv");
        FAIL() << "empty cell accepted";
    } catch (const DataError& e) {
        const std::string what = e.what();
        EXPECT_NE(what.find("row"), std::string::npos) << what;
        EXPECT_NE(what.find("row 3 column 2"), std::string::npos) << what;
    }
    write_text(dir / "text.csv", "y,z\n1,abc\n");
    EXPECT_THROW(read_table_csv(dir / "text.csv"), DataError);
    write_text(dir / "ragged.csv", "y,z\n1,2,3\n");
    EXPECT_THROW(read_table_csv(dir / "ragged.csv"), DataError);
    write_text(dir / "na.csv", "y\nNA\n");
    EXPECT_THROW(read_table_csv(dir / "na.csv"), DataError);
    EXPECT_ANY_THROW(read_table_csv(dir / "absent.csv"));
}

TEST(Csv, FunctionalRoundTripIsExact) {
    const fs::path dir = scratch("functional");
    Rng rng(13);
    const FunctionalCovariate x{Grid(Eigen::VectorXd::LinSpaced(15, 0.0, 1.0)),
                                lssboost::testing::random_normal(8, 15, rng)};
    write_functional_csv(dir / "x.csv", x);
    const FunctionalCovariate back = read_functional_csv(dir / "x.csv");
    EXPECT_TRUE(back.grid.points() == x.grid.points());
    EXPECT_TRUE(back.values == x.values);
    write_text(dir / "short.csv", "0,0.5,1\n1,2\n");
    EXPECT_THROW(read_functional_csv(dir / "short.csv"), DataError);
}

TEST(Lags, ColumnsAndDroppedRows) {
    Dataset d;
    d.response = Eigen::VectorXd::LinSpaced(6, 1.0, 6.0);
    const Dataset out = with_lags(d, {{"y", 2, LagTransform::identity}, {"y", 1, LagTransform::log_square}});
    ASSERT_EQ(out.size(), 4);
    EXPECT_EQ(out.response(0), 3.0);
    EXPECT_EQ(out.scalar(lag_column_name("y", 1, LagTransform::identity))(0), 2.0);
    EXPECT_EQ(out.scalar(lag_column_name("y", 2, LagTransform::identity))(0), 1.0);
    EXPECT_EQ(out.scalar(lag_column_name("y", 2, LagTransform::identity))(3), 4.0);
    EXPECT_NEAR(out.scalar(lag_column_name("y", 1, LagTransform::log_square))(0), std::log(4.0), 1e-15);
    EXPECT_EQ(lag_column_name("y", 3, LagTransform::identity), "y_lag3");
    EXPECT_EQ(lag_column_name("y", 1, LagTransform::log_square), "logsq_y_lag1");
    EXPECT_THROW(with_lags(d, {{"y", 6, LagTransform::identity}}), DimensionError);
    EXPECT_THROW(with_lags(d, {{"y", 0, LagTransform::identity}}), ConfigError);
    d.response(0) = 0.0;
    EXPECT_THROW(with_lags(d, {{"y", 1, LagTransform::log_square}}), DataError);
}

TEST(Config, ParsesNestedConfig) {
    const RunConfig cfg = parse_config(minimal_config(), "/base");
    EXPECT_EQ(cfg.family, "normal-ls");
    EXPECT_EQ(cfg.seed, 7u);
    EXPECT_EQ(cfg.data.table, fs::path("/base/d.csv"));
    EXPECT_EQ(cfg.data.functional.at("x1"), fs::path("/base/x1.csv"));
    ASSERT_EQ(cfg.model.parameters.size(), 2u);
    ASSERT_EQ(cfg.model.parameters[0].size(), 2u);
    EXPECT_EQ(cfg.model.parameters[0][1].kind, TermKind::signal);
    EXPECT_EQ(cfg.model.parameters[0][1].K, 20);
    EXPECT_EQ(cfg.model.parameters[0][1].df, 2.0);
    // A parameter without terms gets the intercept.
    ASSERT_EQ(cfg.model.parameters[1].size(), 1u);
    EXPECT_EQ(cfg.model.parameters[1][0].kind, TermKind::intercept);
    EXPECT_EQ(cfg.step_lengths, (std::vector<double>{0.1, 0.01}));
    EXPECT_EQ(cfg.mstop, (std::vector<int>{100, 50}));
}

TEST(Config, LagTermsExpandAndMerge) {
    nlohmann::json j = minimal_config();
    j["formula"]["sigma"] = nlohmann::json::parse(R"([
        {"term": "intercept"},
        {"term": "lag", "var": "y", "p": 2, "transform": "log_square"}])");
    j["formula"]["mu"] = nlohmann::json::parse(R"([
        {"term": "intercept"}, {"term": "lag", "var": "y", "p": 3}, {"term": "lag", "var": "y", "p": 1}])");
    const RunConfig cfg = parse_config(j, ".");
    // mu: intercept + 3 + 1 lag columns; sigma: intercept + 2.
    ASSERT_EQ(cfg.model.parameters[0].size(), 5u);
    EXPECT_EQ(cfg.model.parameters[0][3].variable, "y_lag3");
    EXPECT_EQ(cfg.model.parameters[0][1].kind, TermKind::linear);
    ASSERT_EQ(cfg.model.parameters[1].size(), 3u);
    EXPECT_EQ(cfg.model.parameters[1][2].variable, "logsq_y_lag2");
    ASSERT_EQ(cfg.lags.size(), 2u);
    int identity_order = 0;
    for (const auto& lag : cfg.lags) {
        if (lag.transform == LagTransform::identity) identity_order = lag.order;
    }
    EXPECT_EQ(identity_order, 3);
}

TEST(Config, Errors) {
    auto with = [](const char* pointer, nlohmann::json value) {
        nlohmann::json j = minimal_config();
        j[nlohmann::json::json_pointer(pointer)] = std::move(value);
        return j;
    };
    EXPECT_THROW(parse_config(with("/family", "gamma"), "."), ConfigError);
    EXPECT_THROW(parse_config(with("/formula/mu/1/term", "tensor"), "."), ConfigError);
    EXPECT_THROW(parse_config(with("/formula/mu/1/basis", "wavelet"), "."), ConfigError);
    EXPECT_THROW(parse_config(with("/formula/nu", nlohmann::json::array()), "."), ConfigError);
    EXPECT_THROW(parse_config(with("/boost/step", {0.1}), "."), ConfigError);
    EXPECT_THROW(parse_config(with("/boost/mstop", {1, 2, 3}), "."), ConfigError);
    EXPECT_THROW(parse_config(with("/tuning", {{"grid_max", {10}}}), "."), ConfigError);
    EXPECT_THROW(parse_config(with("/tuning", {{"method", "aic"}}), "."), ConfigError);
    EXPECT_THROW(parse_config(with("/seed", "seven"), "."), ConfigError);
    EXPECT_THROW(parse_config(nlohmann::json::array(), "."), ConfigError);
    // The t family has three parameters.
    EXPECT_THROW(parse_config(with("/family", "t-ls"), "."), ConfigError);
    nlohmann::json t = with("/family", "t-ls");
    t["boost"]["step"] = {0.1, 0.01, 0.01};
    t["boost"]["mstop"] = {10, 10, 10};
    EXPECT_EQ(parse_config(t, ".").model.parameters.size(), 3u);

    const fs::path dir = scratch("config");
    write_text(dir / "broken.json", "{\"family\": ");
    EXPECT_THROW(load_config(dir / "broken.json"), ConfigError);
    EXPECT_THROW(load_config(dir / "absent.json"), ConfigError);
}

TEST(Manifest, HashIsStableAndSensitive) {
    const nlohmann::json a = minimal_config();
    const std::string h = config_hash(a);
    EXPECT_EQ(h.size(), 16u);
    EXPECT_EQ(h, config_hash(nlohmann::json::parse(a.dump(2))));
    nlohmann::json b = a;
    b["seed"] = 8;
    EXPECT_NE(h, config_hash(b));

    const RunConfig cfg = parse_config(a, ".");
    const nlohmann::json m = make_manifest("fit", cfg, {"coefficients.csv"});
    EXPECT_EQ(m.at("command"), "fit");
    EXPECT_EQ(m.at("library_version"), kLibraryVersion);
    EXPECT_EQ(m.at("seed"), 7);
    EXPECT_EQ(m.at("config_hash"), h);
    EXPECT_EQ(m.at("outputs").size(), 1u);
    EXPECT_EQ(m.at("config"), a);
}

TEST(Artifacts, CoefficientRoundTripPredictsIdentically) {
    const fs::path dir = scratch("coef");
    const auto c = lssboost::testing::make_sim_case(VarianceRegime::linear, "coef1", 21, 200, 100);
    const auto family = make_family("normal-ls");
    const BuiltModel model = build_model(lssboost::testing::sim_model_spec(), c.train);
    const FitState fit = boost_fit(*family, c.train.response, model.blocks, {{0.1, 0.01}, {80, 120}, {}, false});
    write_coefficients(dir / "coefficients.csv", *family, model, fit);
    const FitState back = read_coefficients(dir / "coefficients.csv", *family, model);
    const ParamVector p = predict(*family, fit, model, c.test);
    const ParamVector r = predict(*family, back, model, c.test);
    for (int q = 0; q < 2; ++q) EXPECT_LT(max_abs_diff(p.predictors[q], r.predictors[q]), 1e-10);

    // Dropped rows and unknown labels are reported.
    std::string text = read_text(dir / "coefficients.csv");
    const auto last = text.rfind('\n', text.size() - 2);
    write_text(dir / "truncated.csv", text.substr(0, last + 1));
    EXPECT_THROW(read_coefficients(dir / "truncated.csv", *family, model), DataError);
    write_text(dir / "unknown.csv", text + "mu,x9,0,1\n");
    EXPECT_THROW(read_coefficients(dir / "unknown.csv", *family, model), UnknownLabelError);
    write_text(dir / "garbled.csv", text + "mu,x1,0,zero\n");
    EXPECT_THROW(read_coefficients(dir / "garbled.csv", *family, model), DataError);
}

TEST(Artifacts, RiskSurfaceHeader) {
    const fs::path dir = scratch("risk");
    const auto family = make_family("normal-ls");
    RiskSurface s;
    s.grid = make_stop_grid({10, 10}, 2);
    s.fold_risk = Eigen::MatrixXd::Constant(static_cast<Eigen::Index>(s.grid.size()), 3, 1.5);
    s.mean_risk = Eigen::VectorXd::Constant(s.fold_risk.rows(), 1.5);
    s.best = s.grid.front();
    write_risk_surface(dir / "risk.csv", *family, s);
    std::vector<std::string> header;
    const auto rows = read_rows_csv(dir / "risk.csv", &header);
    EXPECT_EQ(header, (std::vector<std::string>{"m_stop_1", "m_stop_2", "mean_risk", "fold_1", "fold_2", "fold_3"}));
    EXPECT_EQ(rows.size(), s.grid.size());
}
