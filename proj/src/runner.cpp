#include "rmlab/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "rmlab/error.hpp"
#include "rmlab/io.hpp"
#include "rmlab/numerics.hpp"

namespace rmlab {

namespace {

using nlohmann::json;
using clock_type = std::chrono::steady_clock;

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

struct Verdict {
    std::string name;
    std::string status;  // pass | fail | skip
    std::string detail;
};

json verdicts_to_json(const std::vector<Verdict>& verdicts) {
    json arr = json::array();
    for (const Verdict& v : verdicts)
        arr.push_back({{"name", v.name}, {"status", v.status}, {"detail", v.detail}});
    return arr;
}

bool all_passed(const std::vector<Verdict>& verdicts) {
    return std::all_of(verdicts.begin(), verdicts.end(),
                       [](const Verdict& v) { return v.status != "fail"; });
}

json config_to_json(const ExperimentConfig& c) {
    json j;
    j["experiment"] = {
        {"type", c.type},           {"seed", c.seed},
        {"trials", c.trials},       {"workers", c.workers},
        {"output_dir", c.output_dir}, {"eps_grid", c.eps_grid},
        {"k", c.k},                 {"shared_stream", c.shared_stream},
        {"ci_level", c.ci_level},
    };
    j["ensemble"] = {
        {"n", c.n},
        {"symmetry", c.symmetry},
        {"entry", c.entry},
        {"diagonal", c.diagonal},
        {"interpolation_t", c.interpolation_t},
        {"center_z", c.center_z},
    };
    j["perturbation"] = {{"kind", c.perturbation.kind},
                         {"scale", c.perturbation.scale},
                         {"path", c.perturbation.path}};
    j["event"] = {{"kind", c.event_kind}, {"threshold_factor", c.threshold_factor}};
    j["fit"] = {{"tag", c.fit_tag},
                {"gamma", c.gamma},
                {"custom_exponent", c.custom_exponent},
                {"min_hits", c.min_hits}};
    j["params"] = {{"t_grid", c.t_grid},
                   {"u_norm", c.u_norm},
                   {"planted", c.planted},
                   {"bench_instances", c.bench_instances},
                   {"rv_d_grid", c.rv_d_grid},
                   {"rv_error_eps", c.rv_error_eps}};
    j["tolerances"] = {{"abs_p", c.tol.abs_p},
                       {"stderr_mult", c.tol.stderr_mult},
                       {"slope", c.tol.slope},
                       {"slope_min_margin", c.tol.slope_min_margin},
                       {"max_ci_high", c.tol.max_ci_high},
                       {"k0_max", c.tol.k0_max},
                       {"cb_residual", c.tol.cb_residual},
                       {"median_gap", c.tol.median_gap}};
    return j;
}

std::string curve_csv(const std::vector<SweepPoint>& curve) {
    std::ostringstream out;
    out << "eps,hits,trials,p_hat,ci_low,ci_high\n";
    for (const SweepPoint& p : curve) {
        out << fmt(p.eps) << "," << p.estimate.hits << "," << p.estimate.trials << ","
            << fmt(p.estimate.p_hat) << "," << fmt(p.estimate.ci_low) << ","
            << fmt(p.estimate.ci_high) << "\n";
    }
    return out.str();
}

json curve_to_json(const std::vector<SweepPoint>& curve) {
    json arr = json::array();
    for (const SweepPoint& p : curve) {
        arr.push_back({{"eps", p.eps},
                       {"hits", p.estimate.hits},
                       {"trials", p.estimate.trials},
                       {"p_hat", p.estimate.p_hat},
                       {"ci_low", p.estimate.ci_low},
                       {"ci_high", p.estimate.ci_high}});
    }
    return arr;
}

json fit_to_json(const ExponentFit& fit) {
    const char* tag = "custom";
    switch (fit.tag) {
        case PredictionTag::IID_k2: tag = "iid_k2"; break;
        case PredictionTag::SymGap: tag = "sym_gap"; break;
        case PredictionTag::SmoothOptimal: tag = "smooth_optimal"; break;
        case PredictionTag::Perturbed: tag = "perturbed"; break;
        case PredictionTag::Custom: tag = "custom"; break;
    }
    return {{"slope", fit.slope},
            {"slope_stderr", fit.slope_stderr},
            {"intercept", fit.intercept},
            {"points_used", fit.points_used},
            {"predicted_exponent", fit.predicted},
            {"tag", tag}};
}

double mc_stderr(const TailEstimate& e) {
    const double p = e.p_hat;
    return std::sqrt(std::max(p * (1.0 - p), 0.0) /
                     static_cast<double>(e.trials));
}

// Minimal single constant C with p_hat <= C * eps^exponent at every usable
// point; the envelope consistency check for the Wegner-style upper bounds.
struct Envelope {
    double constant = 0.0;
    int points = 0;
    int violations = 0;  // points whose ci_low exceeds the envelope
};

Envelope fit_envelope(const std::vector<SweepPoint>& curve, double exponent) {
    Envelope env;
    for (const SweepPoint& p : curve) {
        if (p.estimate.hits == 0) continue;
        env.constant =
            std::max(env.constant, p.estimate.p_hat / std::pow(p.eps, exponent));
        ++env.points;
    }
    for (const SweepPoint& p : curve) {
        if (p.estimate.ci_low > env.constant * std::pow(p.eps, exponent) + 1e-15)
            ++env.violations;
    }
    return env;
}

struct StageTimer {
    clock_type::time_point start = clock_type::now();
    std::ostringstream log;

    void stage(const std::string& name, clock_type::time_point& mark) {
        const auto now = clock_type::now();
        log << "stage " << name << ": "
            << std::chrono::duration<double>(now - mark).count() << " s\n";
        mark = now;
    }
};

RealMatrix planted_near_singular(int n, int k, double eps, std::uint64_t seed,
                                 std::uint64_t stream) {
    Prng prng({seed, stream}, 0);
    RealMatrix g1(n, n), g2(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) g1(i, j) = prng.normal();
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) g2(i, j) = prng.normal();
    const RealMatrix q1 = Eigen::HouseholderQR<RealMatrix>(g1).householderQ();
    const RealMatrix q2 = Eigen::HouseholderQR<RealMatrix>(g2).householderQ();
    RealVector d = RealVector::Ones(n);
    const double small = 0.5 * eps / std::sqrt(static_cast<double>(n));
    for (int i = 0; i < k; ++i) d(n - 1 - i) = small;
    return q1 * d.asDiagonal() * q2.transpose();
}

TailEstimate make_qualifying_estimate(const ImplicationAudit& audit,
                                      std::uint64_t seed, double ci_level) {
    TailEstimate e;
    e.hits = audit.qualifying;
    e.trials = audit.trials;
    e.seed = seed;
    e.ci_level = ci_level;
    e.p_hat = static_cast<double>(audit.qualifying) /
              static_cast<double>(audit.trials);
    const BinomialInterval ci =
        clopper_pearson(audit.qualifying, audit.trials, ci_level);
    e.ci_low = ci.lo;
    e.ci_high = ci.hi;
    return e;
}

// Substream tags for the bench streams; keep them clear of the tags the
// ensemble samplers use (0 and 1) and the concentration subspace (2).
constexpr std::uint64_t kBenchNySubstream = 4;
constexpr std::uint64_t kBenchCbSubstream = 5;
constexpr std::uint64_t kBenchMonoSubstream = 6;
constexpr std::uint64_t kBenchRvBaseSubstream = 8;

json run_toolkit_bench(const ExperimentConfig& config,
                       std::vector<Verdict>& verdicts, std::string& curve_text) {
    json bench;
    const auto instances = static_cast<std::uint64_t>(config.bench_instances);

    // Restricted invertibility on random 4 x 12 gaussian instances, l = 2.
    const int ny_rows = 4, ny_cols = 12, ny_l = 2;
    double k0_max_seen = 0.0;
    std::uint64_t greedy_competitive = 0;
    for (std::uint64_t i = 0; i < instances; ++i) {
        Prng prng({config.seed, i}, kBenchNySubstream);
        RealMatrix z(ny_rows, ny_cols);
        for (int r = 0; r < ny_rows; ++r)
            for (int c = 0; c < ny_cols; ++c) z(r, c) = prng.normal();
        const SubsetSelection brute =
            ny_select(z, ny_l, SubsetSelection::Method::BruteForce);
        const SubsetSelection greedy =
            ny_select(z, ny_l, SubsetSelection::Method::Greedy);
        k0_max_seen = std::max(k0_max_seen, brute.k0_used);
        if (greedy.sigma_min_restricted >= 0.5 * brute.sigma_min_restricted)
            ++greedy_competitive;
    }
    const double greedy_fraction =
        instances ? static_cast<double>(greedy_competitive) / instances : 0.0;
    bench["ny_select"] = {{"instances", instances},
                          {"rows", ny_rows},
                          {"cols", ny_cols},
                          {"l", ny_l},
                          {"k0_max", k0_max_seen},
                          {"greedy_competitive_fraction", greedy_fraction}};
    verdicts.push_back({"k0_within_bound",
                        k0_max_seen <= config.tol.k0_max ? "pass" : "fail",
                        "max K0 " + fmt(k0_max_seen) + " vs " +
                            fmt(config.tol.k0_max)});
    if (instances >= 100)
        verdicts.push_back({"greedy_competitive",
                            greedy_fraction >= 0.95 ? "pass" : "fail",
                            "fraction " + fmt(greedy_fraction)});

    // Cauchy-Binet residuals on random small instances.
    double cb_max = 0.0;
    for (std::uint64_t i = 0; i < instances; ++i) {
        Prng prng({config.seed, i}, kBenchCbSubstream);
        const int k = 1 + static_cast<int>(prng.next_u64() % 3);
        const int m = k + static_cast<int>(prng.next_u64() % (8 - k + 1));
        RealMatrix z(k, m);
        for (int r = 0; r < k; ++r)
            for (int c = 0; c < m; ++c) z(r, c) = prng.normal();
        std::vector<int> all(m);
        for (int c = 0; c < m; ++c) all[c] = c;
        cb_max = std::max(cb_max, cauchy_binet_residual(z, all));
    }
    bench["cauchy_binet"] = {{"instances", instances}, {"max_residual", cb_max}};
    verdicts.push_back({"cauchy_binet_ok",
                        cb_max <= config.tol.cb_residual ? "pass" : "fail",
                        "max residual " + fmt(cb_max)});

    // Coordinate-restriction monotonicity of distances.
    std::uint64_t mono_violations = 0;
    for (std::uint64_t i = 0; i < instances; ++i) {
        Prng prng({config.seed, i}, kBenchMonoSubstream);
        const int n = 5 + static_cast<int>(prng.next_u64() % 16);
        const int h_cols = 1 + static_cast<int>(prng.next_u64() % (n - 1));
        RealVector c(n);
        for (int r = 0; r < n; ++r) c(r) = prng.normal();
        RealMatrix h(n, h_cols);
        for (int r = 0; r < n; ++r)
            for (int s = 0; s < h_cols; ++s) h(r, s) = prng.normal();
        const int subset_size = 1 + static_cast<int>(prng.next_u64() % n);
        std::vector<int> idx(n);
        for (int r = 0; r < n; ++r) idx[r] = r;
        for (int r = n - 1; r > 0; --r)
            std::swap(idx[r], idx[prng.next_u64() % (r + 1)]);
        idx.resize(subset_size);
        if (!check_restriction_monotonicity(c, h, idx).holds) ++mono_violations;
    }
    bench["restriction_monotonicity"] = {{"instances", instances},
                                         {"violations", mono_violations}};
    verdicts.push_back({"monotonicity_ok", mono_violations == 0 ? "pass" : "fail",
                        std::to_string(mono_violations) + " violations"});

    // Length-squared sampling calibration curve: P(spectral error <= eps0 *
    // |X|_2) against the sample count d. The "eps" column of curve.csv holds d.
    std::vector<double> d_grid = config.rv_d_grid;
    if (d_grid.empty()) d_grid = {10, 25, 50, 100, 200};
    Prng base({config.seed, 0}, kBenchRvBaseSubstream - 1);
    RealMatrix x(3, 6);
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 6; ++c) x(r, c) = base.normal();
    Eigen::BDCSVD<RealMatrix> xsvd(x);
    const double x_norm = xsvd.singularValues()(0);
    std::vector<SweepPoint> curve;
    for (std::size_t di = 0; di < d_grid.size(); ++di) {
        const int d = static_cast<int>(d_grid[di]);
        std::uint64_t hits = 0;
        for (std::uint64_t t = 0; t < config.trials; ++t) {
            Prng prng({config.seed, t}, kBenchRvBaseSubstream + di);
            const LengthSquaredSample s = rv_length_squared_sample(x, d, prng);
            if (s.approx_error <= config.rv_error_eps * x_norm) ++hits;
        }
        SweepPoint point;
        point.eps = d;
        point.estimate.hits = hits;
        point.estimate.trials = config.trials;
        point.estimate.seed = config.seed;
        point.estimate.ci_level = config.ci_level;
        point.estimate.p_hat =
            static_cast<double>(hits) / static_cast<double>(config.trials);
        const BinomialInterval ci =
            clopper_pearson(hits, config.trials, config.ci_level);
        point.estimate.ci_low = ci.lo;
        point.estimate.ci_high = ci.hi;
        curve.push_back(point);
    }
    curve_text = curve_csv(curve);
    bench["rv_sampling"] = {{"matrix_rows", 3},
                            {"matrix_cols", 6},
                            {"error_eps", config.rv_error_eps},
                            {"trials_per_d", config.trials},
                            {"curve", curve_to_json(curve)}};
    return bench;
}

}  // namespace

RunResult run_experiment(const ExperimentConfig& config) {
    config.validate();

    std::string out_dir = config.output_dir;
    if (const char* env = std::getenv("RMLAB_OUTPUT_DIR")) out_dir = env;
    std::filesystem::create_directories(out_dir);

    StageTimer timer;
    auto mark = timer.start;

    json summary;
    summary["version"] = kVersion;
    summary["experiment"] = config.type;
    summary["config"] = config_to_json(config);
    summary["config_text"] = config.to_text();

    std::vector<Verdict> verdicts;
    std::string curve_text;
    bool underpowered = false;

    const bool sweep_type =
        config.type == "edelman" || config.type == "szarek_k2" ||
        config.type == "iid_overcrowding" || config.type == "perturbed_iid" ||
        config.type == "wigner_gaps" || config.type == "goe_wegner" ||
        config.type == "perturbed_wigner";

    if (sweep_type) {
        const EnsembleSpec spec = config.build_ensemble();
        const EventFamily event = config.build_event();
        const auto curve =
            sweep_tail(spec, event, config.eps_grid, config.trials, config.seed,
                       config.workers, config.shared_stream, config.ci_level);
        timer.stage("sample+estimate", mark);

        curve_text = curve_csv(curve);
        summary["curve"] = curve_to_json(curve);

        // Levy concentration of the entry law at each eps, for the perturbed
        // bounds that are stated through p(eps).
        if (config.type == "perturbed_iid" || config.type == "perturbed_wigner") {
            const EntryDistribution entry = parse_distribution(config.entry);
            json levy = json::array();
            for (double eps : config.eps_grid)
                levy.push_back({{"eps", eps}, {"p", levy_concentration(entry, eps)}});
            summary["levy_concentration"] = levy;
        }

        // The fitted exponent is the headline result for the repulsion-rate
        // experiments; for edelman and the one-sided null checks it is only
        // reported when the grid supports it.
        const bool fit_is_headline =
            config.type == "szarek_k2" || config.type == "iid_overcrowding" ||
            config.type == "wigner_gaps" || config.type == "goe_wegner" ||
            config.type == "perturbed_wigner";
        try {
            const ExponentFit fit =
                fit_exponent(curve, config.prediction(), config.k, config.gamma,
                             config.custom_exponent, config.min_hits);
            summary["fit"] = fit_to_json(fit);

            if (config.type == "szarek_k2" || config.type == "iid_overcrowding") {
                const bool ok = std::abs(fit.slope - fit.predicted) <= config.tol.slope;
                verdicts.push_back({"slope_matches_prediction", ok ? "pass" : "fail",
                                    "slope " + fmt(fit.slope) + " vs " +
                                        fmt(fit.predicted) + " +- " +
                                        fmt(config.tol.slope)});
            }
            if (config.type == "wigner_gaps" || config.type == "perturbed_wigner" ||
                config.type == "goe_wegner") {
                const bool ok =
                    fit.slope >= fit.predicted - config.tol.slope_min_margin;
                verdicts.push_back({"slope_at_least_prediction", ok ? "pass" : "fail",
                                    "slope " + fmt(fit.slope) + " vs >= " +
                                        fmt(fit.predicted) + " - " +
                                        fmt(config.tol.slope_min_margin)});
                const double optimal = predicted_exponent(
                    PredictionTag::SmoothOptimal, config.k, 0.0, 0.0);
                summary["optimal_rate_exponent"] = optimal;
                verdicts.push_back({"slope_vs_optimal_rate", "skip",
                                    "informational: slope " + fmt(fit.slope) +
                                        " vs optimal " + fmt(optimal)});
            }
        } catch (const Error& e) {
            if (e.code() != "underpowered") throw;
            summary["fit"] = nullptr;
            if (fit_is_headline) {
                underpowered = true;
                // Smallest per-point budget that would put min_hits expected
                // hits on the weakest point; with zero hits everywhere the
                // binomial upper limit still bounds the rate from above.
                double min_p = 1.0;
                bool any_hits = false;
                for (const auto& p : curve) {
                    if (p.estimate.hits > 0) {
                        any_hits = true;
                        min_p = std::min(min_p, p.estimate.p_hat);
                    }
                }
                if (!any_hits) {
                    for (const auto& p : curve)
                        min_p = std::min(min_p, p.estimate.ci_high);
                }
                const double suggested =
                    std::ceil(config.min_hits / std::max(min_p, 1e-12));
                summary["underpowered_hint"] = {
                    {"reason", "fewer than 3 grid points reached min_hits"},
                    {"suggested_trials_per_point", suggested},
                    {"estimate_basis", any_hits ? "weakest nonzero point"
                                                : "binomial upper limits"}};
            }
        }

        if (config.type == "edelman") {
            bool ok = true;
            std::string detail;
            for (const SweepPoint& p : curve) {
                const double reference = edelman_cdf(p.eps);
                const double tol = std::max(config.tol.stderr_mult * mc_stderr(p.estimate),
                                            config.tol.abs_p);
                const double gap = std::abs(p.estimate.p_hat - reference);
                if (gap > tol) ok = false;
                detail += "eps " + fmt(p.eps) + ": |p_hat - cdf| = " + fmt(gap) +
                          " tol " + fmt(tol) + "; ";
            }
            verdicts.push_back({"points_match_cdf", ok ? "pass" : "fail", detail});
        }
        if (config.type == "wigner_gaps") {
            const double exponent =
                predicted_exponent(config.prediction(), config.k, config.gamma,
                                   config.custom_exponent);
            const Envelope env = fit_envelope(curve, exponent);
            summary["envelope"] = {{"constant", env.constant},
                                   {"exponent", exponent},
                                   {"points", env.points},
                                   {"violations", env.violations}};
            verdicts.push_back({"upper_bound_envelope",
                                env.violations == 0 ? "pass" : "fail",
                                "C = " + fmt(env.constant) + ", violations " +
                                    std::to_string(env.violations)});
        }
        if (config.type == "perturbed_iid") {
            bool ok = true;
            std::string detail;
            for (const SweepPoint& p : curve) {
                if (p.estimate.ci_high > config.tol.max_ci_high) ok = false;
                detail += "eps " + fmt(p.eps) + ": ci_high " +
                          fmt(p.estimate.ci_high) + "; ";
            }
            verdicts.push_back({"null_event_ci", ok ? "pass" : "fail",
                                detail + "bound " + fmt(config.tol.max_ci_high)});
        }
        timer.stage("fit+verdicts", mark);
    } else if (config.type == "concentration") {
        const EntryDistribution dist = parse_distribution(config.entry);
        RealVector u = RealVector::Zero(config.n);
        if (config.u_norm != 0.0) u(0) = config.u_norm;
        const ConcentrationReport report = concentration_experiment(
            config.n, config.k, dist, u, config.trials, config.seed, config.t_grid,
            config.workers);
        timer.stage("sample+estimate", mark);

        std::vector<SweepPoint> curve(report.t_grid.size());
        for (std::size_t i = 0; i < report.t_grid.size(); ++i) {
            curve[i].eps = report.t_grid[i];
            curve[i].estimate = report.tail[i];
        }
        curve_text = curve_csv(curve);
        summary["curve"] = curve_to_json(curve);
        summary["concentration"] = {
            {"empirical_median", report.empirical_median},
            {"predicted_median", report.predicted_median},
            {"median_gap", report.median_gap},
            {"analytic_chi_median", report.analytic_chi_median},
            {"median_stderr", report.median_stderr},
            {"tail_slope_in_t_sq", report.tail_slope_in_t_sq},
            {"tail_slope_stderr", report.tail_slope_stderr},
            {"tail_points_used", report.tail_points_used}};

        const bool median_ok =
            std::abs(report.median_gap) <= config.tol.median_gap;
        verdicts.push_back({"median_near_predicted", median_ok ? "pass" : "fail",
                            "gap " + fmt(report.median_gap) + " tol " +
                                fmt(config.tol.median_gap)});
        bool decreasing = true;
        for (std::size_t i = 1; i < report.tail.size(); ++i)
            if (report.tail[i].hits >= report.tail[i - 1].hits) decreasing = false;
        verdicts.push_back({"tail_strictly_decreasing", decreasing ? "pass" : "fail",
                            "hit counts along the t grid"});
        const bool slope_ok = report.tail_points_used >= 2 &&
                              report.tail_slope_in_t_sq < 0.0 &&
                              report.tail_slope_in_t_sq +
                                      2.0 * report.tail_slope_stderr <
                                  0.0;
        verdicts.push_back({"tail_superlinear_in_t_sq", slope_ok ? "pass" : "fail",
                            "slope " + fmt(report.tail_slope_in_t_sq) + " +- " +
                                fmt(report.tail_slope_stderr)});
        if (dist.family() == EntryDistribution::Family::StandardGaussian &&
            config.u_norm == 0.0) {
            const double gap =
                std::abs(report.empirical_median - report.analytic_chi_median);
            const bool ok = gap <= 3.0 * report.median_stderr;
            verdicts.push_back({"gaussian_matches_chi_median", ok ? "pass" : "fail",
                                "gap " + fmt(gap) + " vs 3 stderr " +
                                    fmt(3.0 * report.median_stderr)});
        }
        timer.stage("fit+verdicts", mark);
    } else if (config.type == "implication_audit") {
        const EnsembleSpec spec = config.build_ensemble();
        const double eps = config.eps_grid.front();
        const ImplicationAudit audit = distance_event_experiment(
            spec, config.k, eps, config.trials, config.seed, config.workers);
        timer.stage("sample+estimate", mark);

        std::uint64_t planted_violations = 0;
        double planted_min_slack = std::numeric_limits<double>::infinity();
        for (std::uint64_t i = 0; i < config.planted; ++i) {
            const RealMatrix m = planted_near_singular(config.n, config.k, eps,
                                                       config.seed,
                                                       config.trials + i);
            const auto [lhs, rhs] = audit_distance_implication(m, config.k);
            if (lhs > rhs * (1.0 + 1e-8)) ++planted_violations;
            planted_min_slack =
                std::min(planted_min_slack, rhs / std::max(lhs, 1e-300));
        }
        timer.stage("planted", mark);

        std::vector<SweepPoint> curve(1);
        curve[0].eps = eps;
        curve[0].estimate = make_qualifying_estimate(audit, config.seed,
                                                     config.ci_level);
        curve_text = curve_csv(curve);
        summary["curve"] = curve_to_json(curve);
        summary["audit"] = {{"trials", audit.trials},
                            {"qualifying", audit.qualifying},
                            {"violations", audit.violations},
                            {"min_slack", audit.min_slack},
                            {"median_slack", audit.median_slack},
                            {"no_events", audit.no_events},
                            {"planted", config.planted},
                            {"planted_violations", planted_violations}};
        if (config.planted > 0)
            summary["audit"]["planted_min_slack"] = planted_min_slack;

        verdicts.push_back({"no_violations", audit.violations == 0 ? "pass" : "fail",
                            std::to_string(audit.violations) + " of " +
                                std::to_string(audit.qualifying) + " qualifying"});
        if (config.planted > 0)
            verdicts.push_back({"planted_no_violations",
                                planted_violations == 0 ? "pass" : "fail",
                                std::to_string(planted_violations) + " of " +
                                    std::to_string(config.planted)});
        if (audit.no_events)
            verdicts.push_back({"qualifying_events", "skip",
                                "no-events: no qualifying trials in budget"});
        timer.stage("fit+verdicts", mark);
    } else if (config.type == "toolkit_bench") {
        summary["bench"] = run_toolkit_bench(config, verdicts, curve_text);
        timer.stage("bench", mark);
    }

    summary["underpowered"] = underpowered;
    summary["verdicts"] = verdicts_to_json(verdicts);
    summary["all_passed"] = all_passed(verdicts) && !underpowered;

    const auto total =
        std::chrono::duration<double>(clock_type::now() - timer.start).count();
    summary["wall_time_seconds"] = total;

    RunResult result;
    result.curve_path = out_dir + "/curve.csv";
    result.summary_path = out_dir + "/summary.json";
    atomic_write_file(result.curve_path, curve_text);
    atomic_write_file(result.summary_path, summary.dump(2) + "\n");
    timer.stage("write", mark);

    std::ostringstream log;
    log << "rmlab " << kVersion << "\nexperiment: " << config.type << "\n"
        << timer.log.str() << "total: " << total << " s\n";
    atomic_write_file(out_dir + "/run.log", log.str());

    result.all_passed = summary["all_passed"];
    result.status = underpowered ? ExitStatus::Underpowered : ExitStatus::Ok;
    return result;
}

}  // namespace rmlab
