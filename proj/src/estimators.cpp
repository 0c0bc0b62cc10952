#include "rmlab/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <numeric>

#include "rmlab/error.hpp"
#include "rmlab/numerics.hpp"

namespace rmlab {

namespace {

// Splits [0, trials) into one chunk per worker and merges partial results in
// chunk order. Per-trial work depends only on (seed, trial index), so the
// merged result is identical at any worker count.
template <typename Partial, typename ChunkFn, typename MergeFn>
Partial parallel_chunks(std::uint64_t trials, int workers, ChunkFn chunk_fn,
                        Partial init, MergeFn merge) {
    workers = std::max(1, workers);
    if (workers == 1 || trials < 2) {
        return merge(std::move(init), chunk_fn(0, trials));
    }
    const std::uint64_t per = (trials + workers - 1) / workers;
    std::vector<std::future<Partial>> futures;
    for (std::uint64_t lo = 0; lo < trials; lo += per) {
        const std::uint64_t hi = std::min(trials, lo + per);
        futures.push_back(std::async(std::launch::async,
                                     [&chunk_fn, lo, hi] { return chunk_fn(lo, hi); }));
    }
    Partial acc = std::move(init);
    for (auto& f : futures) acc = merge(std::move(acc), f.get());
    return acc;
}

double weighted_variance_of_log(std::uint64_t hits, std::uint64_t trials) {
    // Delta method: Var(log p_hat) ~ (1 - p) / (trials * p). The half-count
    // guard keeps the weight finite when every trial hit.
    const double misses = std::max(static_cast<double>(trials - hits), 0.5);
    return misses / (static_cast<double>(trials) * static_cast<double>(hits));
}

struct Wls {
    double slope = 0.0;
    double stderr_slope = 0.0;
    double intercept = 0.0;
};

Wls weighted_least_squares(const std::vector<double>& x, const std::vector<double>& y,
                           const std::vector<double>& var) {
    double sw = 0, swx = 0, swy = 0, swxx = 0, swxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double w = 1.0 / var[i];
        sw += w;
        swx += w * x[i];
        swy += w * y[i];
        swxx += w * x[i] * x[i];
        swxy += w * x[i] * y[i];
    }
    const double det = sw * swxx - swx * swx;
    Wls fit;
    fit.slope = (sw * swxy - swx * swy) / det;
    fit.intercept = (swy - fit.slope * swx) / sw;
    fit.stderr_slope = std::sqrt(sw / det);
    return fit;
}

TailEstimate make_estimate(std::uint64_t hits, std::uint64_t trials,
                           std::uint64_t seed, double ci_level) {
    TailEstimate e;
    e.hits = hits;
    e.trials = trials;
    e.seed = seed;
    e.ci_level = ci_level;
    e.p_hat = static_cast<double>(hits) / static_cast<double>(trials);
    const BinomialInterval ci = clopper_pearson(hits, trials, ci_level);
    e.ci_low = ci.lo;
    e.ci_high = ci.hi;
    return e;
}

}  // namespace

double event_statistic(const EnsembleSpec& /*spec*/, const EventFamily& event,
                       const RealMatrix& sample) {
    switch (event.kind) {
        case EventFamily::Kind::KthSmallestSv: {
            const Spectrum s = singular_values_via_gram(sample);
            return kth_smallest_sv(s, event.k);
        }
        case EventFamily::Kind::CenteredRunHalfWidth: {
            const Spectrum s = eigenvalues_sym(sample);
            return centered_run_half_width(s, event.k, event.center_z);
        }
        case EventFamily::Kind::MinKGap: {
            const Spectrum s = eigenvalues_sym(sample);
            return min_k_gap(s, event.k);
        }
    }
    throw Error("invalid-event", "unhandled event kind");
}

void validate_event(const EnsembleSpec& spec, const EventFamily& event) {
    if (event.k < 1 || event.k > spec.n)
        throw Error("invalid-event", "k out of range for the ensemble dimension");
    if (event.kind == EventFamily::Kind::MinKGap && event.k < 2)
        throw Error("invalid-event", "gap events need k >= 2");
    if (event.kind != EventFamily::Kind::KthSmallestSv &&
        spec.symmetry != EnsembleSpec::Symmetry::SymmetricWigner)
        throw Error("invalid-event", "eigenvalue events need a symmetric ensemble");
    if (!(event.threshold_factor > 0.0))
        throw Error("invalid-event", "threshold factor must be positive");
}

namespace {

TailEstimate mc_tail_impl(const EnsembleSpec& spec, const EventFamily& event,
                          double eps, std::uint64_t trials, std::uint64_t seed,
                          std::uint64_t stream_offset, int workers, double ci_level) {
    if (trials < 1) throw Error("bad-argument", "trials must be >= 1");
    spec.validate();
    validate_event(spec, event);
    const double threshold = event.threshold(eps, spec.n);
    const auto chunk = [&](std::uint64_t lo, std::uint64_t hi) {
        std::uint64_t hits = 0;
        for (std::uint64_t t = lo; t < hi; ++t) {
            const RealMatrix m = sample(spec, {seed, stream_offset + t});
            if (event_statistic(spec, event, m) <= threshold) ++hits;
        }
        return hits;
    };
    const std::uint64_t hits = parallel_chunks<std::uint64_t>(
        trials, workers, chunk, 0,
        [](std::uint64_t a, std::uint64_t b) { return a + b; });
    return make_estimate(hits, trials, seed, ci_level);
}

}  // namespace

TailEstimate mc_tail(const EnsembleSpec& spec, const EventFamily& event, double eps,
                     std::uint64_t trials, std::uint64_t seed, int workers,
                     double ci_level) {
    return mc_tail_impl(spec, event, eps, trials, seed, 0, workers, ci_level);
}

std::vector<SweepPoint> sweep_tail(const EnsembleSpec& spec, const EventFamily& event,
                                   const std::vector<double>& eps_grid,
                                   std::uint64_t trials_per_point, std::uint64_t seed,
                                   int workers, bool shared_stream, double ci_level) {
    if (eps_grid.empty()) throw Error("empty-grid", "eps grid must be nonempty");
    for (std::size_t i = 0; i < eps_grid.size(); ++i) {
        if (eps_grid[i] <= 0.0)
            throw Error("bad-grid", "eps grid must be positive");
        if (i > 0 && eps_grid[i] <= eps_grid[i - 1])
            throw Error("bad-grid", "eps grid must be strictly increasing");
    }

    std::vector<SweepPoint> out(eps_grid.size());
    if (!shared_stream) {
        for (std::size_t i = 0; i < eps_grid.size(); ++i) {
            out[i].eps = eps_grid[i];
            out[i].estimate =
                mc_tail_impl(spec, event, eps_grid[i], trials_per_point, seed,
                             i * trials_per_point, workers, ci_level);
        }
        return out;
    }

    spec.validate();
    validate_event(spec, event);
    std::vector<double> thresholds(eps_grid.size());
    for (std::size_t i = 0; i < eps_grid.size(); ++i)
        thresholds[i] = event.threshold(eps_grid[i], spec.n);

    using Hits = std::vector<std::uint64_t>;
    const auto chunk = [&](std::uint64_t lo, std::uint64_t hi) {
        Hits hits(thresholds.size(), 0);
        for (std::uint64_t t = lo; t < hi; ++t) {
            const RealMatrix m = sample(spec, {seed, t});
            const double stat = event_statistic(spec, event, m);
            for (std::size_t i = 0; i < thresholds.size(); ++i)
                if (stat <= thresholds[i]) ++hits[i];
        }
        return hits;
    };
    const Hits hits = parallel_chunks<Hits>(
        trials_per_point, workers, chunk, Hits(thresholds.size(), 0),
        [](Hits a, const Hits& b) {
            for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
            return a;
        });
    for (std::size_t i = 0; i < eps_grid.size(); ++i) {
        out[i].eps = eps_grid[i];
        out[i].estimate = make_estimate(hits[i], trials_per_point, seed, ci_level);
    }
    return out;
}

double predicted_exponent(PredictionTag tag, int k, double gamma, double custom) {
    const double kd = k;
    switch (tag) {
        case PredictionTag::IID_k2:
            return kd * kd;
        case PredictionTag::SymGap:
            return kd * (kd - 1.0) / 2.0;
        case PredictionTag::SmoothOptimal:
            return kd * (kd + 1.0) / 2.0;
        case PredictionTag::Perturbed:
            return (1.0 - gamma) * kd * kd;
        case PredictionTag::Custom:
            return custom;
    }
    return custom;
}

ExponentFit fit_exponent(const std::vector<SweepPoint>& curve, PredictionTag tag,
                         int k, double gamma, double custom_exponent,
                         std::uint64_t min_hits) {
    std::vector<double> x, y, var;
    for (const SweepPoint& p : curve) {
        if (p.estimate.hits < std::max<std::uint64_t>(min_hits, 1)) continue;
        x.push_back(std::log(p.eps));
        y.push_back(std::log(p.estimate.p_hat));
        var.push_back(weighted_variance_of_log(p.estimate.hits, p.estimate.trials));
    }
    if (x.size() < 3)
        throw Error("underpowered", "need at least 3 points with enough hits");
    const Wls wls = weighted_least_squares(x, y, var);
    ExponentFit fit;
    fit.slope = wls.slope;
    fit.slope_stderr = wls.stderr_slope;
    fit.intercept = wls.intercept;
    fit.points_used = static_cast<int>(x.size());
    fit.tag = tag;
    fit.predicted = predicted_exponent(tag, k, gamma, custom_exponent);
    return fit;
}

ConcentrationReport concentration_experiment(int n, int k, const EntryDistribution& dist,
                                             const RealVector& u, std::uint64_t trials,
                                             std::uint64_t seed,
                                             std::vector<double> t_grid, int workers) {
    if (k < 1 || k > n) throw Error("bad-k", "need 1 <= k <= n");
    if (u.size() != n) throw Error("bad-argument", "u must have dimension n");
    if (trials < 2) throw Error("bad-argument", "need at least 2 trials");
    if (t_grid.empty()) t_grid = {0.1, 0.2, 0.3, 0.4, 0.5};

    // Fixed random k-dimensional subspace, drawn from a substream no trial
    // uses (trials draw from substream 0 of their own stream).
    Prng subspace_rng({seed, 0}, 2);
    RealMatrix g(n, k);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < k; ++j) g(i, j) = subspace_rng.normal();
    const RealMatrix q = Eigen::HouseholderQR<RealMatrix>(g)
                             .householderQ() *
                         RealMatrix::Identity(n, k);

    using Values = std::vector<double>;
    const auto chunk = [&](std::uint64_t lo, std::uint64_t hi) {
        Values xs;
        xs.reserve(hi - lo);
        RealVector c(n);
        for (std::uint64_t t = lo; t < hi; ++t) {
            Prng rng({seed, t}, 0);
            for (int i = 0; i < n; ++i) c(i) = dist.sample(rng);
            xs.push_back((q * (q.transpose() * c) - u).norm());
        }
        return xs;
    };
    const Values xs = parallel_chunks<Values>(
        trials, workers, chunk, {}, [](Values a, const Values& b) {
            a.insert(a.end(), b.begin(), b.end());
            return a;
        });

    Values sorted = xs;
    std::sort(sorted.begin(), sorted.end());
    const std::size_t mid = sorted.size() / 2;
    const double median = sorted.size() % 2 == 1
                              ? sorted[mid]
                              : 0.5 * (sorted[mid - 1] + sorted[mid]);

    ConcentrationReport report;
    report.empirical_median = median;
    report.predicted_median = std::sqrt(static_cast<double>(k) + u.squaredNorm());
    report.median_gap = median - report.predicted_median;
    // chi_k median: invert the regularized gamma CDF at 1/2.
    const double chi2_median = num::find_root(
        [k](double v) { return num::gamma_p(0.5 * k, 0.5 * v) - 0.5; }, 0.0,
        4.0 * k + 20.0, 1e-11);
    report.analytic_chi_median = std::sqrt(chi2_median);

    double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / xs.size();
    double ss = 0.0;
    for (double v : xs) ss += (v - mean) * (v - mean);
    const double sd = std::sqrt(ss / (xs.size() - 1));
    report.median_stderr = 1.2533141373155003 * sd / std::sqrt(double(xs.size()));

    const double sqrt_k = std::sqrt(static_cast<double>(k));
    report.t_grid = t_grid;
    std::vector<double> fit_x, fit_y, fit_var;
    for (double t : t_grid) {
        std::uint64_t hits = 0;
        for (double v : xs)
            if (std::abs(v - median) >= t * sqrt_k) ++hits;
        report.tail.push_back(make_estimate(hits, trials, seed, 0.95));
        if (hits >= 1) {
            fit_x.push_back(t * t);
            fit_y.push_back(std::log(static_cast<double>(hits) / trials));
            fit_var.push_back(weighted_variance_of_log(hits, trials));
        }
    }
    report.tail_points_used = static_cast<int>(fit_x.size());
    if (fit_x.size() >= 2) {
        const Wls wls = weighted_least_squares(fit_x, fit_y, fit_var);
        report.tail_slope_in_t_sq = wls.slope;
        report.tail_slope_stderr = wls.stderr_slope;
    }
    return report;
}

std::pair<double, double> audit_distance_implication(const RealMatrix& m, int k) {
    const int n = static_cast<int>(m.rows());
    if (k < 1 || k > n) throw Error("bad-k", "k out of range");
    Eigen::BDCSVD<RealMatrix> svd(m, Eigen::ComputeFullV);
    // Rows of Z are the bottom-k right singular vectors z_i, for which
    // |M z_i| = sigma_{n-i+1}.
    const RealMatrix z = svd.matrixV().rightCols(k).transpose();
    const RealMatrix b = m * z.transpose();  // columns M z_i

    const std::vector<int> subset = best_minor_by_determinant(z);
    RealMatrix a(k, k);  // A = Z_J^T
    for (int j = 0; j < k; ++j) a.row(j) = z.col(subset[j]).transpose();
    // B A^{-1} = ((A^T)^{-1} B^T)^T
    const RealMatrix b_ainv =
        a.transpose().partialPivLu().solve(b.transpose()).transpose();
    const double rhs = b_ainv.squaredNorm();

    std::vector<int> rest;
    rest.reserve(n - k);
    for (int j = 0; j < n; ++j)
        if (std::find(subset.begin(), subset.end(), j) == subset.end())
            rest.push_back(j);
    RealMatrix h(n, static_cast<Eigen::Index>(rest.size()));
    for (std::size_t j = 0; j < rest.size(); ++j) h.col(j) = m.col(rest[j]);
    double lhs = 0.0;
    for (int j : subset) {
        const double d = dist_to_colspan(m.col(j), h);
        lhs += d * d;
    }
    return {lhs, rhs};
}

ImplicationAudit distance_event_experiment(const EnsembleSpec& spec, int k, double eps,
                                           std::uint64_t trials, std::uint64_t seed,
                                           int workers) {
    spec.validate();
    if (k < 1 || k > spec.n) throw Error("bad-k", "k out of range");
    const double threshold = eps / std::sqrt(static_cast<double>(spec.n));

    struct Partial {
        std::uint64_t qualifying = 0;
        std::uint64_t violations = 0;
        std::vector<double> slacks;
    };
    const auto chunk = [&](std::uint64_t lo, std::uint64_t hi) {
        Partial p;
        for (std::uint64_t t = lo; t < hi; ++t) {
            const RealMatrix m = sample(spec, {seed, t});
            const Spectrum s = singular_values_via_gram(m);
            if (kth_smallest_sv(s, k) > threshold) continue;
            ++p.qualifying;
            const auto [lhs, rhs] = audit_distance_implication(m, k);
            if (lhs > rhs * (1.0 + 1e-8)) ++p.violations;
            p.slacks.push_back(rhs / std::max(lhs, 1e-300));
        }
        return p;
    };
    const Partial total = parallel_chunks<Partial>(
        trials, workers, chunk, {}, [](Partial a, const Partial& b) {
            a.qualifying += b.qualifying;
            a.violations += b.violations;
            a.slacks.insert(a.slacks.end(), b.slacks.begin(), b.slacks.end());
            return a;
        });

    ImplicationAudit audit;
    audit.trials = trials;
    audit.qualifying = total.qualifying;
    audit.violations = total.violations;
    audit.no_events = total.qualifying == 0;
    if (!total.slacks.empty()) {
        std::vector<double> sorted = total.slacks;
        std::sort(sorted.begin(), sorted.end());
        audit.min_slack = sorted.front();
        audit.median_slack = sorted[sorted.size() / 2];
    }
    return audit;
}

}  // namespace rmlab
