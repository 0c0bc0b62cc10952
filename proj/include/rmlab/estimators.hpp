#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "rmlab/binomial.hpp"
#include "rmlab/ensembles.hpp"
#include "rmlab/geometry.hpp"
#include "rmlab/spectra.hpp"

namespace rmlab {

/// One Monte Carlo tail estimate with its exact binomial interval.
struct TailEstimate {
    std::uint64_t hits = 0;
    std::uint64_t trials = 0;
    double p_hat = 0.0;
    double ci_low = 0.0;
    double ci_high = 1.0;
    double ci_level = 0.95;
    std::uint64_t seed = 0;
};

/// The tail events all have the form {statistic(sample spectrum) <= c * eps}
/// with c = threshold_factor / sqrt(n). The statistic kind decides which
/// spectrum is computed and how it is reduced to a scalar.
struct EventFamily {
    enum class Kind {
        KthSmallestSv,         // sigma_{n-k+1}
        CenteredRunHalfWidth,  // k consecutive eigenvalues around z
        MinKGap,               // lambda_{i+k-1} - lambda_i anywhere
    };

    Kind kind = Kind::KthSmallestSv;
    int k = 1;
    double center_z = 0.0;
    double threshold_factor = 1.0;  // threshold(eps) = factor * eps / sqrt(n)

    double threshold(double eps, int n) const {
        return threshold_factor * eps / std::sqrt(static_cast<double>(n));
    }
};

/// Scalar statistic of one sampled matrix; the event at level eps is
/// {statistic <= threshold(eps)}.
double event_statistic(const EnsembleSpec& spec, const EventFamily& event,
                       const RealMatrix& sample);

/// Validates the event against the ensemble (gap statistics need a symmetric
/// ensemble, k must fit the dimension). Throws Error("invalid-event", ...).
void validate_event(const EnsembleSpec& spec, const EventFamily& event);

/// Estimates P(statistic <= threshold(eps)) over independent trials streamed
/// by (seed, trial index). Deterministic for fixed inputs at any worker count.
TailEstimate mc_tail(const EnsembleSpec& spec, const EventFamily& event,
                     double eps, std::uint64_t trials, std::uint64_t seed,
                     int workers = 1, double ci_level = 0.95);

struct SweepPoint {
    double eps = 0.0;
    TailEstimate estimate;
};

/// One estimate per grid point. In shared-stream mode (the default) every
/// grid point sees the same trial statistics, which makes the estimated curve
/// exactly monotone in eps and costs one spectrum per trial instead of one
/// per (trial, point).
std::vector<SweepPoint> sweep_tail(const EnsembleSpec& spec, const EventFamily& event,
                                   const std::vector<double>& eps_grid,
                                   std::uint64_t trials_per_point, std::uint64_t seed,
                                   int workers = 1, bool shared_stream = true,
                                   double ci_level = 0.95);

enum class PredictionTag { IID_k2, SymGap, SmoothOptimal, Perturbed, Custom };

double predicted_exponent(PredictionTag tag, int k, double gamma, double custom);

/// Weighted least squares fit of log p_hat against log eps.
struct ExponentFit {
    double slope = 0.0;
    double slope_stderr = 0.0;
    double intercept = 0.0;
    int points_used = 0;
    double predicted = 0.0;
    PredictionTag tag = PredictionTag::Custom;
};

/// Points with fewer than min_hits hits are dropped (rare-event noise guard);
/// fewer than three usable points throws Error("underpowered", ...). Weights
/// are the inverse delta-method variances of log p_hat.
ExponentFit fit_exponent(const std::vector<SweepPoint>& curve, PredictionTag tag,
                         int k, double gamma = 0.0, double custom_exponent = 0.0,
                         std::uint64_t min_hits = 10);

/// Concentration of X = |P c - u| for the projection P onto a fixed random
/// k-dimensional subspace and c with iid entries.
struct ConcentrationReport {
    double empirical_median = 0.0;
    double predicted_median = 0.0;  // sqrt(k + |u|^2)
    double median_gap = 0.0;
    double analytic_chi_median = 0.0;  // gaussian-entry reference, u = 0
    double median_stderr = 0.0;
    std::vector<double> t_grid;
    std::vector<TailEstimate> tail;  // P(|X - median| >= t sqrt(k))
    double tail_slope_in_t_sq = 0.0;
    double tail_slope_stderr = 0.0;
    int tail_points_used = 0;
};

ConcentrationReport concentration_experiment(int n, int k, const EntryDistribution& dist,
                                             const RealVector& u, std::uint64_t trials,
                                             std::uint64_t seed,
                                             std::vector<double> t_grid = {},
                                             int workers = 1);

/// Audit of the small-singular-value => small-column-distances implication:
/// on every trial where sigma_{n-k+1} <= eps/sqrt(n), build Z from the
/// bottom-k right singular subspace, pick the best-determinant k columns J,
/// and check sum_i dist(col_i, span(rest))^2 <= |B A^{-1}|_F^2.
struct ImplicationAudit {
    std::uint64_t trials = 0;
    std::uint64_t qualifying = 0;
    std::uint64_t violations = 0;
    double min_slack = 0.0;     // min over qualifying trials of rhs / lhs
    double median_slack = 0.0;
    bool no_events = false;
};

ImplicationAudit distance_event_experiment(const EnsembleSpec& spec, int k, double eps,
                                           std::uint64_t trials, std::uint64_t seed,
                                           int workers = 1);

/// Single-instance version used for planted matrices; returns (lhs, rhs).
std::pair<double, double> audit_distance_implication(const RealMatrix& m, int k);

}  // namespace rmlab
