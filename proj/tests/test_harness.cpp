#define DOCTEST_CONFIG_IMPLEMENT
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "rmlab/config.hpp"
#include "rmlab/error.hpp"
#include "rmlab/io.hpp"
#include "rmlab/runner.hpp"

using namespace rmlab;
using nlohmann::json;
namespace fs = std::filesystem;

int main(int argc, char** argv) {
    ::unsetenv("RMLAB_OUTPUT_DIR");
    return doctest::Context(argc, argv).run();
}

namespace {

int dir_counter = 0;

std::string fresh_dir() {
    const auto dir = fs::temp_directory_path() /
                     ("rmlab_test_" + std::to_string(::getpid()) + "_" +
                      std::to_string(dir_counter++));
    fs::remove_all(dir);
    return dir.string();
}

const char* kEdelmanConfig = R"(
[experiment]
type = "edelman"
seed = 7001
trials = 400
workers = 1
output_dir = "OUTDIR"
eps_grid = [0.5, 1.0]
k = 1

[ensemble]
n = 20
symmetry = "iid"
entry = "gaussian"
)";

std::string with_dir(std::string text, const std::string& dir) {
    const auto pos = text.find("OUTDIR");
    text.replace(pos, 6, dir);
    return text;
}

}  // namespace

TEST_CASE("config doc parses sections, arrays, comments and strings") {
    const auto doc = ConfigDoc::parse(R"(
# top comment
top = 3
[a]
x = 1.5          # trailing comment
name = "hello # not a comment"
flag = true
grid = [1, 2.5, 3]
[a.b]
y = -2
)");
    CHECK(doc.get_double("top") == 3.0);
    CHECK(doc.get_double("a.x") == 1.5);
    CHECK(doc.get_string("a.name") == "hello # not a comment");
    CHECK(doc.get_bool("a.flag", false));
    CHECK(doc.get_array("a.grid") == std::vector<double>{1.0, 2.5, 3.0});
    CHECK(doc.get_int("a.b.y") == -2);
    CHECK_FALSE(doc.has("a.missing"));
    CHECK(doc.get_double("a.missing", 9.0) == 9.0);
}

TEST_CASE("config doc errors carry line numbers") {
    try {
        ConfigDoc::parse("x = 1\nbroken line\n");
        FAIL("expected parse error");
    } catch (const Error& e) {
        CHECK(e.code() == "invalid-config");
        CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }
    CHECK_THROWS_AS(ConfigDoc::parse("x = 1\nx = 2\n"), Error);
    CHECK_THROWS_AS(ConfigDoc::parse("[unterminated\n"), Error);
    CHECK_THROWS_AS(ConfigDoc::parse("k = [1, oops]\n"), Error);
}

TEST_CASE("experiment config validation names the missing field") {
    try {
        ExperimentConfig::load_text("[experiment]\ntype = \"edelman\"\n");
        FAIL("expected invalid-config");
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("experiment.seed") != std::string::npos);
    }

    // missing eps_grid
    try {
        ExperimentConfig::load_text(R"(
[experiment]
type = "edelman"
seed = 1
trials = 10
[ensemble]
n = 10
)");
        FAIL("expected invalid-config");
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("eps_grid") != std::string::npos);
    }

    // zero trials
    CHECK_THROWS_AS(ExperimentConfig::load_text(R"(
[experiment]
type = "edelman"
seed = 1
trials = 0
eps_grid = [0.5]
[ensemble]
n = 10
)"),
                    Error);

    // unknown type
    CHECK_THROWS_AS(ExperimentConfig::load_text(R"(
[experiment]
type = "mystery"
seed = 1
trials = 10
eps_grid = [0.5]
[ensemble]
n = 10
)"),
                    Error);
}

TEST_CASE("experiment defaults: event kinds and prediction tags") {
    auto config = ExperimentConfig::load_text(with_dir(kEdelmanConfig, "unused"));
    CHECK(config.build_event().kind == EventFamily::Kind::KthSmallestSv);
    CHECK(config.build_event().threshold_factor == 1.0);
    CHECK(config.prediction() == PredictionTag::Custom);

    config.type = "szarek_k2";
    config.k = 2;
    CHECK(config.prediction() == PredictionTag::IID_k2);

    config.type = "iid_overcrowding";
    CHECK(config.build_event().threshold_factor == 2.0);  // k eps / sqrt(n)
}

TEST_CASE("matrix csv round trip and parse errors") {
    RealMatrix m(2, 3);
    m << 1, 2.5, -3, 4, 5, 6.25;
    const std::string dir = fresh_dir();
    const std::string path = dir + "/m.csv";
    atomic_write_file(path, matrix_to_csv(m));
    const RealMatrix back = read_matrix_csv(path);
    CHECK((back - m).cwiseAbs().maxCoeff() == 0.0);

    atomic_write_file(path, "2,3\n1,2,3\n4,oops,6\n");
    try {
        read_matrix_csv(path);
        FAIL("expected parse error");
    } catch (const Error& e) {
        CHECK(e.code() == "parse-error");
        CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }

    atomic_write_file(path, "2,3\n1,2,3\n");
    CHECK_THROWS_AS(read_matrix_csv(path), Error);
    fs::remove_all(dir);
}

TEST_CASE("edelman run writes artifacts and passes at desk scale") {
    const std::string dir = fresh_dir();
    const auto config = ExperimentConfig::load_text(with_dir(kEdelmanConfig, dir));
    const RunResult result = run_experiment(config);
    CHECK(result.status == ExitStatus::Ok);
    CHECK(fs::exists(dir + "/curve.csv"));
    CHECK(fs::exists(dir + "/summary.json"));
    CHECK(fs::exists(dir + "/run.log"));

    const json summary = json::parse(read_text_file(dir + "/summary.json"));
    CHECK(summary["experiment"] == "edelman");
    CHECK(summary["version"] == std::string(kVersion));
    CHECK(summary["curve"].size() == 2);
    CHECK(summary["verdicts"].size() >= 1);

    const std::string curve = read_text_file(dir + "/curve.csv");
    CHECK(curve.rfind("eps,hits,trials,p_hat,ci_low,ci_high\n", 0) == 0);
    fs::remove_all(dir);
}

TEST_CASE("worker count never shows up in curve.csv") {
    const std::string dir1 = fresh_dir();
    const std::string dir4 = fresh_dir();
    auto config = ExperimentConfig::load_text(with_dir(kEdelmanConfig, dir1));
    run_experiment(config);
    config.workers = 4;
    config.output_dir = dir4;
    run_experiment(config);
    CHECK(read_text_file(dir1 + "/curve.csv") == read_text_file(dir4 + "/curve.csv"));
    fs::remove_all(dir1);
    fs::remove_all(dir4);
}

TEST_CASE("rerunning an identical config is byte identical") {
    const std::string dir = fresh_dir();
    const auto config = ExperimentConfig::load_text(with_dir(kEdelmanConfig, dir));
    run_experiment(config);
    const std::string first = read_text_file(dir + "/curve.csv");
    const json summary1 = json::parse(read_text_file(dir + "/summary.json"));
    run_experiment(config);
    CHECK(read_text_file(dir + "/curve.csv") == first);
    json summary2 = json::parse(read_text_file(dir + "/summary.json"));
    // semantically identical once the wall time is set aside
    json a = summary1, b = summary2;
    a.erase("wall_time_seconds");
    b.erase("wall_time_seconds");
    CHECK(a == b);
    fs::remove_all(dir);
}

TEST_CASE("summary config echo reruns to the same curve") {
    const std::string dir = fresh_dir();
    const auto config = ExperimentConfig::load_text(with_dir(kEdelmanConfig, dir));
    run_experiment(config);
    const std::string first = read_text_file(dir + "/curve.csv");
    const json summary = json::parse(read_text_file(dir + "/summary.json"));

    const std::string dir2 = fresh_dir();
    auto replay = ExperimentConfig::load_text(summary["config_text"]);
    replay.output_dir = dir2;
    run_experiment(replay);
    CHECK(read_text_file(dir2 + "/curve.csv") == first);
    fs::remove_all(dir);
    fs::remove_all(dir2);
}

TEST_CASE("env var overrides the output directory") {
    const std::string dir = fresh_dir();
    const std::string env_dir = fresh_dir();
    const auto config = ExperimentConfig::load_text(with_dir(kEdelmanConfig, dir));
    ::setenv("RMLAB_OUTPUT_DIR", env_dir.c_str(), 1);
    run_experiment(config);
    ::unsetenv("RMLAB_OUTPUT_DIR");
    CHECK(fs::exists(env_dir + "/curve.csv"));
    CHECK_FALSE(fs::exists(dir + "/curve.csv"));
    fs::remove_all(env_dir);
}

TEST_CASE("underpowered runs still write artifacts and exit 3") {
    const std::string dir = fresh_dir();
    const auto config = ExperimentConfig::load_text(with_dir(R"(
[experiment]
type = "szarek_k2"
seed = 11
trials = 60
workers = 1
output_dir = "OUTDIR"
eps_grid = [0.05, 0.07, 0.1]
k = 2

[ensemble]
n = 20
symmetry = "iid"
entry = "gaussian"
)",
                                                             dir));
    const RunResult result = run_experiment(config);
    CHECK(result.status == ExitStatus::Underpowered);
    CHECK(fs::exists(dir + "/curve.csv"));
    const json summary = json::parse(read_text_file(dir + "/summary.json"));
    CHECK(summary["underpowered"] == true);
    CHECK(summary.contains("underpowered_hint"));
    fs::remove_all(dir);
}

TEST_CASE("toolkit bench verdicts pass at small scale") {
    const std::string dir = fresh_dir();
    const auto config = ExperimentConfig::load_text(with_dir(R"(
[experiment]
type = "toolkit_bench"
seed = 5150
trials = 60
workers = 1
output_dir = "OUTDIR"
k = 1

[ensemble]
n = 4

[params]
bench_instances = 60
rv_d_grid = [10, 50, 200]
)",
                                                             dir));
    const RunResult result = run_experiment(config);
    CHECK(result.status == ExitStatus::Ok);
    CHECK(result.all_passed);
    const json summary = json::parse(read_text_file(dir + "/summary.json"));
    CHECK(summary["bench"]["ny_select"]["k0_max"].get<double>() <= 4.0);
    CHECK(summary["bench"]["cauchy_binet"]["max_residual"].get<double>() <= 1e-9);
    CHECK(summary["bench"]["restriction_monotonicity"]["violations"] == 0);
    // curve.csv carries the sampling calibration curve (d in the eps column)
    const std::string curve = read_text_file(dir + "/curve.csv");
    CHECK(std::count(curve.begin(), curve.end(), '\n') == 4);
    fs::remove_all(dir);
}

TEST_CASE("implication audit run with planted instances") {
    const std::string dir = fresh_dir();
    const auto config = ExperimentConfig::load_text(with_dir(R"(
[experiment]
type = "implication_audit"
seed = 99
trials = 500
workers = 2
output_dir = "OUTDIR"
eps_grid = [2.0]
k = 2

[ensemble]
n = 15
symmetry = "iid"
entry = "gaussian"

[params]
planted = 25
)",
                                                             dir));
    const RunResult result = run_experiment(config);
    CHECK(result.status == ExitStatus::Ok);
    const json summary = json::parse(read_text_file(dir + "/summary.json"));
    CHECK(summary["audit"]["violations"] == 0);
    CHECK(summary["audit"]["planted_violations"] == 0);
    CHECK(summary["audit"]["planted"] == 25);
    fs::remove_all(dir);
}

TEST_CASE("concentration run emits the tail curve") {
    const std::string dir = fresh_dir();
    const auto config = ExperimentConfig::load_text(with_dir(R"(
[experiment]
type = "concentration"
seed = 313
trials = 2000
workers = 1
output_dir = "OUTDIR"
k = 8

[ensemble]
n = 64
entry = "rademacher"

[params]
t_grid = [0.2, 0.3, 0.4]
)",
                                                             dir));
    const RunResult result = run_experiment(config);
    CHECK(result.status == ExitStatus::Ok);
    const json summary = json::parse(read_text_file(dir + "/summary.json"));
    CHECK(summary["concentration"].contains("empirical_median"));
    CHECK(summary["curve"].size() == 3);
    fs::remove_all(dir);
}

TEST_CASE("perturbation kinds build the stated matrices") {
    auto config = ExperimentConfig::load_text(with_dir(kEdelmanConfig, "unused"));
    config.type = "iid_overcrowding";
    config.perturbation.kind = "scaled_identity";
    config.perturbation.scale = 10.0;
    auto spec = config.build_ensemble();
    REQUIRE(spec.perturbation_f.has_value());
    CHECK((*spec.perturbation_f - 10.0 * RealMatrix::Identity(20, 20))
              .cwiseAbs()
              .maxCoeff() == 0.0);

    config.perturbation.kind = "scaled_all_ones";
    config.perturbation.scale = 2.0;
    spec = config.build_ensemble();
    CHECK((*spec.perturbation_f - 2.0 * RealMatrix::Ones(20, 20))
              .cwiseAbs()
              .maxCoeff() == 0.0);
}

TEST_CASE("canonical config text parses back to an equivalent config") {
    const auto config = ExperimentConfig::load_text(with_dir(kEdelmanConfig, "keep"));
    const auto round = ExperimentConfig::load_text(config.to_text());
    CHECK(round.type == config.type);
    CHECK(round.seed == config.seed);
    CHECK(round.trials == config.trials);
    CHECK(round.eps_grid == config.eps_grid);
    CHECK(round.output_dir == config.output_dir);
    CHECK(round.n == config.n);
    CHECK(round.to_text() == config.to_text());
}
