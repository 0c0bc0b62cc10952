#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rmlab/rng.hpp"

namespace rmlab {

/// One atom of a discrete entry law.
struct Atom {
    double value = 0.0;
    double mass = 0.0;
};

/// A scalar entry law with mean zero and variance one. Discrete families are
/// normalized on construction; bounded families expose the almost-sure bound.
class EntryDistribution {
  public:
    enum class Family {
        StandardGaussian,
        Rademacher,
        UniformSymmetric,
        LatticeUniform,
        ShiftedBernoulli,
    };

    static EntryDistribution standard_gaussian();
    static EntryDistribution rademacher();
    /// Uniform on [-sqrt(3), sqrt(3)] (the variance-one halfwidth).
    static EntryDistribution uniform_symmetric();
    /// Arbitrary atoms; shifted and scaled to mean zero, variance one.
    static EntryDistribution lattice_uniform(std::vector<Atom> atoms);
    /// {1-p with prob p, -p with prob 1-p} scaled to variance one.
    static EntryDistribution shifted_bernoulli(double p);

    Family family() const { return family_; }
    const std::string& name() const { return name_; }
    double mean() const { return 0.0; }
    double variance() const { return 1.0; }
    /// Declared subgaussian moment B, for reporting.
    double subgaussian_moment() const { return subgaussian_b_; }
    /// Almost-sure bound K with P(|xi| <= K) = 1; empty for gaussian.
    std::optional<double> almost_sure_bound() const { return bound_k_; }
    bool is_discrete() const { return !atoms_.empty(); }
    const std::vector<Atom>& atoms() const { return atoms_; }

    double sample(Prng& rng) const;

    /// Fourth moment E xi^4 (exact per family); used by variance-error
    /// estimates in reports and tests.
    double fourth_moment() const;

  private:
    EntryDistribution() = default;

    Family family_ = Family::StandardGaussian;
    std::string name_;
    double subgaussian_b_ = 0.0;
    std::optional<double> bound_k_;
    std::vector<Atom> atoms_;        // discrete families only, sorted by value
    std::vector<double> cum_mass_;   // cumulative masses for inversion
    double halfwidth_ = 0.0;         // UniformSymmetric only
};

/// Levy concentration function p(eps) = sup_x P(|xi - x| <= eps), computed
/// analytically per family: maximal window mass for atoms, maximal-density
/// window integral for the continuous families.
double levy_concentration(const EntryDistribution& dist, double eps);

/// Parses "gaussian", "rademacher", "uniform", "bernoulli(p)".
EntryDistribution parse_distribution(const std::string& text);

}  // namespace rmlab
