#include "rmlab/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rmlab/error.hpp"
#include "rmlab/numerics.hpp"

namespace rmlab {

namespace {

void require_finite(const RealMatrix& m) {
    if (!m.allFinite()) throw Error("invalid-matrix", "non-finite entries");
}

}  // namespace

Spectrum singular_values(const RealMatrix& m) {
    require_finite(m);
    Eigen::BDCSVD<RealMatrix> svd(m);
    Spectrum s;
    s.ordering = Spectrum::Ordering::SingularDescending;
    s.source_dim = static_cast<int>(m.rows());
    s.values.assign(svd.singularValues().data(),
                    svd.singularValues().data() + svd.singularValues().size());
    return s;
}

Spectrum singular_values_via_gram(const RealMatrix& m) {
    require_finite(m);
    const RealMatrix gram = m.transpose() * m;
    Eigen::SelfAdjointEigenSolver<RealMatrix> es(gram, Eigen::EigenvaluesOnly);
    Spectrum s;
    s.ordering = Spectrum::Ordering::SingularDescending;
    s.source_dim = static_cast<int>(m.rows());
    const auto& ev = es.eigenvalues();  // ascending
    s.values.resize(ev.size());
    for (Eigen::Index i = 0; i < ev.size(); ++i)
        s.values[ev.size() - 1 - i] = std::sqrt(std::max(ev(i), 0.0));
    return s;
}

Spectrum eigenvalues_sym(const RealMatrix& x) {
    require_finite(x);
    if (x.rows() != x.cols()) throw Error("not-symmetric", "matrix is not square");
    const double scale = std::max(1.0, x.size() > 0 ? x.cwiseAbs().maxCoeff() : 0.0);
    if ((x - x.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
        throw Error("not-symmetric", "matrix is not symmetric");
    Eigen::SelfAdjointEigenSolver<RealMatrix> es(0.5 * (x + x.transpose()),
                                                 Eigen::EigenvaluesOnly);
    Spectrum s;
    s.ordering = Spectrum::Ordering::EigenAscending;
    s.source_dim = static_cast<int>(x.rows());
    s.values.assign(es.eigenvalues().data(),
                    es.eigenvalues().data() + es.eigenvalues().size());
    return s;
}

int count_in_interval(const Spectrum& s, const IntervalSpec& interval) {
    const double lo = interval.lo();
    const double hi = interval.hi();
    int count = 0;
    for (double v : s.values)
        if (v >= lo && v <= hi) ++count;
    return count;
}

double kth_smallest_sv(const Spectrum& s, int k) {
    if (s.ordering != Spectrum::Ordering::SingularDescending)
        throw Error("bad-k", "kth_smallest_sv needs a singular spectrum");
    const int n = s.size();
    if (k < 1 || k > n) throw Error("bad-k", "k out of range");
    return s.values[n - k];
}

double min_k_gap(const Spectrum& s, int k) {
    if (s.ordering != Spectrum::Ordering::EigenAscending)
        throw Error("bad-k", "min_k_gap needs an ascending spectrum");
    const int n = s.size();
    if (k < 2 || k > n) throw Error("bad-k", "k out of range");
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i + k - 1 < n; ++i)
        best = std::min(best, s.values[i + k - 1] - s.values[i]);
    return best;
}

double centered_run_half_width(const Spectrum& s, int k, double z) {
    if (s.ordering != Spectrum::Ordering::EigenAscending)
        throw Error("bad-k", "centered_run_half_width needs an ascending spectrum");
    const int n = s.size();
    if (k < 1 || k > n) throw Error("bad-k", "k out of range");
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i + k - 1 < n; ++i) {
        const double need = std::max({z - s.values[i], s.values[i + k - 1] - z, 0.0});
        best = std::min(best, need);
    }
    return best;
}

MinMaxCertificate minmax_certificate(const RealMatrix& m, int k) {
    require_finite(m);
    const int n = static_cast<int>(m.rows());
    if (k < 1 || k > n) throw Error("bad-k", "k out of range");
    Eigen::BDCSVD<RealMatrix> svd(m, Eigen::ComputeFullV);
    MinMaxCertificate cert;
    cert.basis = svd.matrixV().rightCols(k);  // bottom-k right singular vectors
    // max |M x| over unit x in the span equals the top singular value of the
    // restriction M * basis.
    Eigen::BDCSVD<RealMatrix> restricted(m * cert.basis);
    cert.achieved_max = restricted.singularValues()(0);
    const double headroom = 1e-8 * std::max(1.0, cert.achieved_max);
    for (int i = 0; i < k; ++i) {
        if ((m * cert.basis.col(i)).norm() > cert.achieved_max + headroom)
            throw Error("internal", "certificate vector exceeds achieved max");
    }
    return cert;
}

double edelman_cdf(double eps) {
    if (eps < 0.0) throw Error("bad-argument", "eps must be >= 0");
    if (eps == 0.0) return 0.0;
    // x = u^2 turns the integrand into (1+u) exp(-(u^2/2 + u)), smooth on
    // [0, eps].
    const double value = num::integrate(
        [](double u) { return (1.0 + u) * std::exp(-(0.5 * u * u + u)); }, 0.0,
        eps, 1e-11);
    return std::min(value, 1.0);
}

double semicircle_cdf(double x) {
    if (x <= -2.0) return 0.0;
    if (x >= 2.0) return 1.0;
    constexpr double pi = 3.14159265358979323846;
    return 0.5 + x * std::sqrt(4.0 - x * x) / (4.0 * pi) + std::asin(0.5 * x) / pi;
}

double semicircle_location(int i, int n) {
    if (n < 1 || i < 1 || i > n) throw Error("bad-k", "need 1 <= i <= n");
    if (i == n) return 2.0;
    const double target = static_cast<double>(i) / n;
    return num::find_root([target](double x) { return semicircle_cdf(x) - target; },
                          -2.0, 2.0, 1e-12);
}

}  // namespace rmlab
