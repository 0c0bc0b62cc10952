#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "rmlab/error.hpp"
#include "rmlab/numerics.hpp"
#include "rmlab/rng.hpp"
#include "rmlab/spectra.hpp"

using namespace rmlab;

namespace {

RealMatrix random_matrix(int rows, int cols, Prng& rng) {
    RealMatrix m(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) m(i, j) = rng.normal();
    return m;
}

// Antiderivative oracle for the hard-edge CDF: the integrand
// (1+u) exp(-(u^2/2+u)) is the derivative of -exp(-(u^2/2+u)).
double edelman_closed_form(double eps) {
    return -std::expm1(-(0.5 * eps * eps + eps));
}

// Independent semicircle CDF by Simpson quadrature of the density.
double semicircle_cdf_quadrature(double x) {
    constexpr double pi = 3.14159265358979323846;
    return num::integrate(
        [](double v) { return std::sqrt(std::max(4.0 - v * v, 0.0)) / (2.0 * pi); },
        -2.0, x, 1e-12);
}

}  // namespace

TEST_CASE("singular values of simple matrices") {
    const Spectrum id3 = singular_values(RealMatrix::Identity(3, 3));
    CHECK(id3.values == std::vector<double>{1.0, 1.0, 1.0});

    RealMatrix d(3, 3);
    d.setZero();
    d.diagonal() << 3.0, 2.0, 1.0;
    const Spectrum ds = singular_values(d);
    CHECK(ds.values[0] == doctest::Approx(3.0));
    CHECK(ds.values[1] == doctest::Approx(2.0));
    CHECK(ds.values[2] == doctest::Approx(1.0));

    RealMatrix nilpotent(2, 2);
    nilpotent << 0, 1, 0, 0;
    const Spectrum ns = singular_values(nilpotent);
    CHECK(ns.values[0] == doctest::Approx(1.0));
    CHECK(ns.values[1] == doctest::Approx(0.0));
}

TEST_CASE("singular values agree with sqrt of gram eigenvalues on random 8x8") {
    Prng rng({31, 0}, 0);
    for (int rep = 0; rep < 50; ++rep) {
        const RealMatrix m = random_matrix(8, 8, rng);
        const Spectrum svd_route = singular_values(m);
        const Spectrum eig_route = eigenvalues_sym(m.transpose() * m);
        for (int i = 0; i < 8; ++i) {
            const double from_eig = std::sqrt(std::max(eig_route.values[7 - i], 0.0));
            CHECK(svd_route.values[i] ==
                  doctest::Approx(from_eig).epsilon(1e-8).scale(svd_route.values[0]));
        }
        // fast gram route agrees with the SVD route
        const Spectrum gram = singular_values_via_gram(m);
        for (int i = 0; i < 8; ++i)
            CHECK(gram.values[i] ==
                  doctest::Approx(svd_route.values[i]).epsilon(1e-8).scale(
                      svd_route.values[0] + 1.0));
    }
}

TEST_CASE("singular triplets satisfy the gram residual bound") {
    Prng rng({33, 0}, 0);
    for (int rep = 0; rep < 20; ++rep) {
        const int n = 4 + static_cast<int>(rng.next_u64() % 9);
        const RealMatrix m = random_matrix(n, n, rng);
        const RealMatrix gram = m.transpose() * m;
        const double scale = singular_values(m).values[0];
        const MinMaxCertificate cert = minmax_certificate(m, n);
        // every right singular vector v with sigma = |M v| satisfies
        // |M^T M v - sigma^2 v| <= 1e-8 |M|^2
        for (int i = 0; i < n; ++i) {
            const RealVector v = cert.basis.col(i);
            const double sigma_sq = (m * v).squaredNorm();
            CHECK((gram * v - sigma_sq * v).norm() <= 1e-8 * scale * scale);
        }
    }
}

TEST_CASE("non-finite input is rejected") {
    RealMatrix m = RealMatrix::Zero(2, 2);
    m(0, 0) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(singular_values(m), Error);
}

TEST_CASE("eigenvalues of symmetric matrices") {
    RealMatrix d = RealMatrix::Zero(3, 3);
    d.diagonal() << -1.0, 0.0, 2.0;
    const Spectrum s = eigenvalues_sym(d);
    CHECK(s.values[0] == doctest::Approx(-1.0));
    CHECK(s.values[1] == doctest::Approx(0.0));
    CHECK(s.values[2] == doctest::Approx(2.0));

    RealMatrix swap(2, 2);
    swap << 0, 1, 1, 0;
    const Spectrum sw = eigenvalues_sym(swap);
    CHECK(sw.values[0] == doctest::Approx(-1.0));
    CHECK(sw.values[1] == doctest::Approx(1.0));

    RealMatrix asym(2, 2);
    asym << 0, 1, 0, 0;
    CHECK_THROWS_AS(eigenvalues_sym(asym), Error);
}

TEST_CASE("trace is preserved by the eigensolver") {
    Prng rng({32, 0}, 0);
    for (int rep = 0; rep < 20; ++rep) {
        RealMatrix m = random_matrix(6, 6, rng);
        m = 0.5 * (m + m.transpose()).eval();
        const Spectrum s = eigenvalues_sym(m);
        double sum = 0.0;
        for (double v : s.values) sum += v;
        CHECK(sum == doctest::Approx(m.trace())
                         .epsilon(0.0)
                         .scale(1.0)
                         .epsilon(1e-9 * 6 * m.cwiseAbs().maxCoeff() + 1e-12));
    }
}

TEST_CASE("interval counting") {
    Spectrum s;
    s.ordering = Spectrum::Ordering::SingularDescending;
    s.values = {0.5, 0.1};
    s.source_dim = 2;
    CHECK(count_in_interval(s, {0.0, 0.2, IntervalSpec::Style::HardEdge}) == 1);
    CHECK(count_in_interval(s, {0.3, 0.0, IntervalSpec::Style::Centered}) == 0);
    CHECK(count_in_interval(s, {0.0, 10.0, IntervalSpec::Style::HardEdge}) == 2);
    // closed interval: exact endpoint counts
    CHECK(count_in_interval(s, {0.0, 0.1, IntervalSpec::Style::HardEdge}) == 1);
    // an interval covering the full range counts everything
    CHECK(count_in_interval(s, {0.0, 100.0, IntervalSpec::Style::Centered}) == 2);
    // additivity over a partition of the line: [c-w, c+w] split at 0.3
    const int below = count_in_interval(s, {-49.85, 50.15, IntervalSpec::Style::Centered});
    const int above = count_in_interval(s, {50.3001, 49.9999, IntervalSpec::Style::Centered});
    CHECK(below + above == 2);
}

TEST_CASE("count is monotone in the half width") {
    Spectrum s;
    s.ordering = Spectrum::Ordering::EigenAscending;
    s.values = {-1.0, -0.2, 0.3, 0.9, 2.0};
    s.source_dim = 5;
    int prev = 0;
    for (double w = 0.0; w <= 3.0; w += 0.05) {
        const int c = count_in_interval(s, {0.0, w, IntervalSpec::Style::Centered});
        CHECK(c >= prev);
        prev = c;
    }
    CHECK(prev == 5);
}

TEST_CASE("kth smallest singular value") {
    Spectrum s;
    s.ordering = Spectrum::Ordering::SingularDescending;
    s.values = {3.0, 2.0, 1.0};
    s.source_dim = 3;
    CHECK(kth_smallest_sv(s, 1) == 1.0);
    CHECK(kth_smallest_sv(s, 2) == 2.0);
    CHECK(kth_smallest_sv(s, 3) == 3.0);
    CHECK_THROWS_AS(kth_smallest_sv(s, 0), Error);
    CHECK_THROWS_AS(kth_smallest_sv(s, 4), Error);
}

TEST_CASE("min k gap") {
    Spectrum s;
    s.ordering = Spectrum::Ordering::EigenAscending;
    s.values = {0.0, 1.0, 2.0, 4.0};
    s.source_dim = 4;
    CHECK(min_k_gap(s, 2) == doctest::Approx(1.0));
    CHECK(min_k_gap(s, 3) == doctest::Approx(2.0));
    CHECK(min_k_gap(s, 4) == doctest::Approx(4.0));
    CHECK_THROWS_AS(min_k_gap(s, 1), Error);
    CHECK_THROWS_AS(min_k_gap(s, 5), Error);

    Spectrum dup;
    dup.ordering = Spectrum::Ordering::EigenAscending;
    dup.values = {1.0, 1.0, 3.0};
    dup.source_dim = 3;
    CHECK(min_k_gap(dup, 2) == 0.0);
}

TEST_CASE("centered run half width matches the count event") {
    Spectrum s;
    s.ordering = Spectrum::Ordering::EigenAscending;
    s.values = {-0.9, -0.1, 0.2, 1.4};
    s.source_dim = 4;
    const int k = 2;
    const double z = 0.0;
    const double stat = centered_run_half_width(s, k, z);
    // event {stat <= w}  <=>  {count in [z-w, z+w] >= k}
    for (double w = 0.0; w <= 2.0; w += 0.01) {
        const bool run_event = stat <= w;
        const bool count_event =
            count_in_interval(s, {z, w, IntervalSpec::Style::Centered}) >= k;
        CHECK(run_event == count_event);
    }
}

TEST_CASE("minmax certificate on diagonal matrices") {
    RealMatrix d = RealMatrix::Zero(3, 3);
    d.diagonal() << 3.0, 2.0, 1.0;
    const MinMaxCertificate cert = minmax_certificate(d, 2);
    CHECK(cert.achieved_max == doctest::Approx(2.0).epsilon(1e-10));
    // basis spans e_2, e_3: projector onto the span fixes those axes
    const RealMatrix proj = cert.basis * cert.basis.transpose();
    CHECK(proj(1, 1) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(proj(2, 2) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(proj(0, 0) == doctest::Approx(0.0).epsilon(1e-10));

    const MinMaxCertificate full = minmax_certificate(d, 3);
    CHECK(full.achieved_max == doctest::Approx(3.0).epsilon(1e-10));
}

TEST_CASE("certificate beats 100 random subspaces and matches the kth sv") {
    Prng rng({77, 1}, 0);
    const int n = 5, k = 2;
    const RealMatrix m = random_matrix(n, n, rng);
    const MinMaxCertificate cert = minmax_certificate(m, k);
    const Spectrum s = singular_values(m);
    CHECK(cert.achieved_max ==
          doctest::Approx(kth_smallest_sv(s, k)).epsilon(1e-8));
    // every certificate vector is feasible for the min-max
    for (int i = 0; i < k; ++i)
        CHECK((m * cert.basis.col(i)).norm() <= cert.achieved_max + 1e-8);
    // the certificate subspace is minimax-optimal: random subspaces do worse
    for (int rep = 0; rep < 100; ++rep) {
        const RealMatrix g = random_matrix(n, k, rng);
        const RealMatrix q =
            Eigen::HouseholderQR<RealMatrix>(g).householderQ() *
            RealMatrix::Identity(n, k);
        Eigen::BDCSVD<RealMatrix> restricted(m * q);
        CHECK(restricted.singularValues()(0) >= cert.achieved_max - 1e-8);
    }
}

TEST_CASE("minmax consistency over random sizes") {
    Prng rng({78, 2}, 0);
    for (int rep = 0; rep < 1000; ++rep) {
        const int n = 2 + static_cast<int>(rng.next_u64() % 9);
        const int k = 1 + static_cast<int>(rng.next_u64() % n);
        const RealMatrix m = random_matrix(n, n, rng);
        const MinMaxCertificate cert = minmax_certificate(m, k);
        const Spectrum s = singular_values(m);
        CHECK(cert.achieved_max ==
              doctest::Approx(kth_smallest_sv(s, k)).epsilon(1e-8).scale(
                  s.values[0] + 1.0));
    }
}

TEST_CASE("edelman cdf against the antiderivative oracle") {
    CHECK(edelman_cdf(0.0) == 0.0);
    for (double eps : {0.01, 0.05, 0.1, 0.3, 0.5, 1.0, 2.0, 5.0}) {
        CHECK(edelman_cdf(eps) ==
              doctest::Approx(edelman_closed_form(eps)).epsilon(0).scale(1).epsilon(
                  1e-10));
    }
    CHECK(edelman_cdf(0.1) == doctest::Approx(0.09967).epsilon(1e-4));
    CHECK(edelman_cdf(50.0) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("edelman cdf matches the cubic expansion below 0.3") {
    for (double eps = 0.01; eps <= 0.3; eps += 0.01) {
        const double series = eps - eps * eps * eps / 3.0;
        CHECK(std::abs(edelman_cdf(eps) - series) <= 2.0 * std::pow(eps, 4));
    }
}

TEST_CASE("edelman cdf is monotone") {
    double prev = 0.0;
    for (double eps = 0.0; eps <= 4.0; eps += 0.05) {
        const double v = edelman_cdf(eps);
        CHECK(v >= prev);
        prev = v;
    }
}

TEST_CASE("semicircle locations") {
    CHECK(semicircle_location(2, 4) == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(semicircle_location(4, 4) == 2.0);

    // oracle: independent quadrature-based bisection
    const double target = 0.25;
    double lo = -2.0, hi = 2.0;
    for (int it = 0; it < 100; ++it) {
        const double mid = 0.5 * (lo + hi);
        (semicircle_cdf_quadrature(mid) < target ? lo : hi) = mid;
    }
    CHECK(semicircle_location(1, 4) == doctest::Approx(0.5 * (lo + hi)).epsilon(1e-8));
}

TEST_CASE("semicircle locations are strictly increasing and symmetric") {
    const int n = 40;
    double prev = -2.1;
    for (int i = 1; i <= n; ++i) {
        const double g = semicircle_location(i, n);
        CHECK(g > prev);
        prev = g;
    }
    for (int i = 1; i < n; ++i) {
        // gamma_i = -gamma_{n-i} for the complementary quantile pair
        CHECK(semicircle_location(i, n) ==
              doctest::Approx(-semicircle_location(n - i, n)).epsilon(1e-9).scale(1.0));
    }
}
