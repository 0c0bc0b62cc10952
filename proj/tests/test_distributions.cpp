#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "rmlab/distributions.hpp"
#include "rmlab/error.hpp"
#include "rmlab/numerics.hpp"

using namespace rmlab;

namespace {

// Independent oracle: integrate the standard normal density over the
// mode-centered window instead of using the erf identity.
double gaussian_window_mass(double eps) {
    return num::integrate(
        [](double x) {
            return std::exp(-0.5 * x * x) / std::sqrt(2.0 * 3.14159265358979323846);
        },
        -eps, eps, 1e-13);
}

std::vector<EntryDistribution> builtins() {
    return {EntryDistribution::standard_gaussian(), EntryDistribution::rademacher(),
            EntryDistribution::uniform_symmetric(),
            EntryDistribution::shifted_bernoulli(0.3),
            EntryDistribution::lattice_uniform({{-2, 0.25}, {0, 0.5}, {3, 0.25}})};
}

}  // namespace

TEST_CASE("rademacher concentration hits the atom masses") {
    const auto d = EntryDistribution::rademacher();
    CHECK(levy_concentration(d, 0.5) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(levy_concentration(d, 1.0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(levy_concentration(d, 0.0) == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("gaussian concentration matches quadrature of the density") {
    const auto d = EntryDistribution::standard_gaussian();
    for (double eps : {0.05, 0.1, 0.5, 1.0, 2.5}) {
        CHECK(levy_concentration(d, eps) ==
              doctest::Approx(gaussian_window_mass(eps)).epsilon(1e-10));
    }
    CHECK(levy_concentration(d, 0.1) == doctest::Approx(0.0797).epsilon(1e-3));
}

TEST_CASE("concentration is monotone and saturates at the support diameter") {
    for (const auto& d : builtins()) {
        double prev = 0.0;
        for (double eps = 0.0; eps <= 6.0; eps += 0.05) {
            const double p = levy_concentration(d, eps);
            CHECK(p >= prev - 1e-14);
            CHECK(p <= 1.0);
            prev = p;
        }
        if (const auto bound = d.almost_sure_bound()) {
            CHECK(levy_concentration(d, *bound) == doctest::Approx(1.0));
        }
    }
}

TEST_CASE("uniform family concentration is the clipped window ratio") {
    const auto d = EntryDistribution::uniform_symmetric();
    const double h = *d.almost_sure_bound();
    CHECK(levy_concentration(d, 0.25 * h) == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(levy_concentration(d, 2.0 * h) == doctest::Approx(1.0));
}

TEST_CASE("negative eps is rejected") {
    CHECK_THROWS_AS(levy_concentration(EntryDistribution::rademacher(), -0.1), Error);
}

TEST_CASE("every builtin samples with mean 0 and variance 1") {
    for (const auto& d : builtins()) {
        Prng rng({2024, 11}, 0);
        const int n = 1000000;
        double sum = 0.0, sum_sq = 0.0, sum_4 = 0.0;
        for (int i = 0; i < n; ++i) {
            const double x = d.sample(rng);
            sum += x;
            sum_sq += x * x;
            sum_4 += x * x * x * x;
        }
        const double mean = sum / n;
        const double var = sum_sq / n - mean * mean;
        const double se_mean = 1.0 / std::sqrt(double(n));
        // se of the sample variance from the fourth moment
        const double se_var = std::sqrt(std::max(sum_4 / n - var * var, 0.0) / n);
        INFO(d.name());
        CHECK(std::abs(mean) <= 5.0 * se_mean);
        CHECK(std::abs(var - 1.0) <= std::max(5.0 * se_var, 1e-9));
    }
}

TEST_CASE("bounded families never exceed their almost-sure bound") {
    for (const auto& d : builtins()) {
        const auto bound = d.almost_sure_bound();
        if (!bound) continue;
        Prng rng({5, 5}, 0);
        for (int i = 0; i < 10000; ++i)
            CHECK(std::abs(d.sample(rng)) <= *bound + 1e-12);
    }
}

TEST_CASE("atoms normalize to mean zero variance one with masses summing to 1") {
    const auto d = EntryDistribution::lattice_uniform({{1, 2.0}, {5, 1.0}, {9, 1.0}});
    double mass = 0.0, mean = 0.0, var = 0.0;
    for (const Atom& a : d.atoms()) {
        mass += a.mass;
        mean += a.mass * a.value;
    }
    for (const Atom& a : d.atoms()) var += a.mass * (a.value - mean) * (a.value - mean);
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(mean) < 1e-12);
    CHECK(var == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("shifted bernoulli matches the two-atom closed form") {
    const double p = 0.2;
    const auto d = EntryDistribution::shifted_bernoulli(p);
    const double s = std::sqrt(p * (1 - p));
    REQUIRE(d.atoms().size() == 2);
    CHECK(d.atoms()[0].value == doctest::Approx(-p / s).epsilon(1e-12));
    CHECK(d.atoms()[1].value == doctest::Approx((1 - p) / s).epsilon(1e-12));
    // window capturing a single atom gives max(p, 1-p)
    CHECK(levy_concentration(d, 0.1) == doctest::Approx(0.8).epsilon(1e-12));
}

TEST_CASE("subgaussian moment is reported for every family") {
    for (const auto& d : builtins()) CHECK(d.subgaussian_moment() > 0.0);
    CHECK(EntryDistribution::standard_gaussian().subgaussian_moment() ==
          doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("parse_distribution round trip") {
    CHECK(parse_distribution("gaussian").family() ==
          EntryDistribution::Family::StandardGaussian);
    CHECK(parse_distribution("rademacher").family() ==
          EntryDistribution::Family::Rademacher);
    CHECK(parse_distribution("uniform").family() ==
          EntryDistribution::Family::UniformSymmetric);
    CHECK(parse_distribution("bernoulli(0.25)").family() ==
          EntryDistribution::Family::ShiftedBernoulli);
    CHECK_THROWS_AS(parse_distribution("cauchy"), Error);
}
