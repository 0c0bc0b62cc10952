#pragma once

#include "rmlab/ensembles.hpp"

namespace rmlab {

/// Ordered spectrum: singular values descending or eigenvalues ascending.
struct Spectrum {
    enum class Ordering { SingularDescending, EigenAscending };

    std::vector<double> values;
    Ordering ordering = Ordering::SingularDescending;
    int source_dim = 0;

    int size() const { return static_cast<int>(values.size()); }
};

/// Closed interval on the real line, either the hard-edge window [0, w] or a
/// centered window [z - w, z + w].
struct IntervalSpec {
    enum class Style { HardEdge, Centered };

    double center_z = 0.0;
    double half_width = 0.0;
    Style style = Style::HardEdge;

    double lo() const { return style == Style::HardEdge ? 0.0 : center_z - half_width; }
    double hi() const { return style == Style::HardEdge ? half_width : center_z + half_width; }
};

/// All singular values of M, descending. Full dense SVD.
Spectrum singular_values(const RealMatrix& m);

/// Singular values via the eigenvalues of M^T M; agrees with
/// singular_values to ~1e-8 relative and is several times faster, which is
/// what the Monte Carlo loops want.
Spectrum singular_values_via_gram(const RealMatrix& m);

/// All eigenvalues of a symmetric matrix, ascending.
Spectrum eigenvalues_sym(const RealMatrix& x);

/// Number of spectrum values inside the closed interval.
int count_in_interval(const Spectrum& s, const IntervalSpec& interval);

/// k-th smallest singular value sigma_{n-k+1}, 1 <= k <= n.
double kth_smallest_sv(const Spectrum& s, int k);

/// min over i of values[i+k-1] - values[i] on an ascending spectrum,
/// 2 <= k <= n.
double min_k_gap(const Spectrum& s, int k);

/// Smallest half-width w such that some k consecutive ascending values all
/// lie in [z - w, z + w]; the event "k values crowd a centered window of
/// half-width w" is exactly {this statistic <= w}.
double centered_run_half_width(const Spectrum& s, int k, double z);

/// Certificate for sigma_{n-k+1}(M) = min over k-dim subspaces of
/// max_{unit x} |M x|: the bottom-k right singular basis achieves it.
struct MinMaxCertificate {
    RealMatrix basis;     // n x k, orthonormal columns z_1..z_k
    double achieved_max;  // max |M x| over unit x in span(basis)
};

MinMaxCertificate minmax_certificate(const RealMatrix& m, int k);

/// CDF of the scaled least singular value of a large Ginibre matrix:
/// integral over [0, eps^2] of (1+sqrt(x))/(2 sqrt(x)) exp(-(x/2+sqrt(x))),
/// evaluated by adaptive quadrature after the substitution x = u^2 removes
/// the endpoint singularity. Absolute error <= 1e-10.
double edelman_cdf(double eps);

/// Classical location gamma_i of the i-th eigenvalue under the semicircle
/// law: solves semicircle_cdf(gamma) = i/n to 1e-10.
double semicircle_location(int i, int n);

/// CDF of the semicircle law on [-2, 2].
double semicircle_cdf(double x);

}  // namespace rmlab
