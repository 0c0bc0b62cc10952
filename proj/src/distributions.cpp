#include "rmlab/distributions.hpp"

#include <algorithm>
#include <cmath>

#include "rmlab/error.hpp"
#include "rmlab/numerics.hpp"

namespace rmlab {

namespace {

constexpr double kSqrt3 = 1.7320508075688772;
constexpr double kSqrtLn2Inv = 1.2011224087864498;  // 1 / sqrt(ln 2)

// Subgaussian moment for a bounded variable: 2 exp(-t^2/B^2) >= P(|xi| > t)
// holds for all t once B = K / sqrt(ln 2).
double bounded_subgaussian_moment(double k) { return k * kSqrtLn2Inv; }

}  // namespace

EntryDistribution EntryDistribution::standard_gaussian() {
    EntryDistribution d;
    d.family_ = Family::StandardGaussian;
    d.name_ = "gaussian";
    d.subgaussian_b_ = std::sqrt(2.0);
    return d;
}

EntryDistribution EntryDistribution::rademacher() {
    EntryDistribution d;
    d.family_ = Family::Rademacher;
    d.name_ = "rademacher";
    d.atoms_ = {{-1.0, 0.5}, {1.0, 0.5}};
    d.cum_mass_ = {0.5, 1.0};
    d.bound_k_ = 1.0;
    d.subgaussian_b_ = bounded_subgaussian_moment(1.0);
    return d;
}

EntryDistribution EntryDistribution::uniform_symmetric() {
    EntryDistribution d;
    d.family_ = Family::UniformSymmetric;
    d.name_ = "uniform";
    d.halfwidth_ = kSqrt3;
    d.bound_k_ = kSqrt3;
    d.subgaussian_b_ = bounded_subgaussian_moment(kSqrt3);
    return d;
}

EntryDistribution EntryDistribution::lattice_uniform(std::vector<Atom> atoms) {
    if (atoms.size() < 2)
        throw Error("bad-argument", "lattice law needs at least two atoms");
    double total = 0.0;
    for (const Atom& a : atoms) {
        if (a.mass < 0.0)
            throw Error("bad-argument", "atom masses must be nonnegative");
        total += a.mass;
    }
    if (std::abs(total - 1.0) > 1e-12) {
        if (total <= 0.0) throw Error("bad-argument", "atom masses sum to 0");
        for (Atom& a : atoms) a.mass /= total;
    }
    double mean = 0.0;
    for (const Atom& a : atoms) mean += a.value * a.mass;
    double var = 0.0;
    for (const Atom& a : atoms) var += (a.value - mean) * (a.value - mean) * a.mass;
    if (var <= 0.0) throw Error("bad-argument", "degenerate atom set");
    const double scale = 1.0 / std::sqrt(var);
    for (Atom& a : atoms) a.value = (a.value - mean) * scale;

    std::sort(atoms.begin(), atoms.end(),
              [](const Atom& x, const Atom& y) { return x.value < y.value; });

    EntryDistribution d;
    d.family_ = Family::LatticeUniform;
    d.name_ = "lattice";
    d.atoms_ = std::move(atoms);
    double cum = 0.0;
    for (const Atom& a : d.atoms_) {
        cum += a.mass;
        d.cum_mass_.push_back(cum);
    }
    d.cum_mass_.back() = 1.0;
    double bound = 0.0;
    for (const Atom& a : d.atoms_) bound = std::max(bound, std::abs(a.value));
    d.bound_k_ = bound;
    d.subgaussian_b_ = bounded_subgaussian_moment(bound);
    return d;
}

EntryDistribution EntryDistribution::shifted_bernoulli(double p) {
    if (!(p > 0.0 && p < 1.0))
        throw Error("bad-argument", "bernoulli p must lie in (0, 1)");
    const double s = std::sqrt(p * (1.0 - p));
    EntryDistribution d = lattice_uniform({{-p / s, 1.0 - p}, {(1.0 - p) / s, p}});
    d.family_ = Family::ShiftedBernoulli;
    d.name_ = "bernoulli(" + std::to_string(p) + ")";
    return d;
}

double EntryDistribution::sample(Prng& rng) const {
    switch (family_) {
        case Family::StandardGaussian:
            return rng.normal();
        case Family::Rademacher:
            return rng.rademacher();
        case Family::UniformSymmetric:
            return (2.0 * rng.uniform01() - 1.0) * halfwidth_;
        case Family::LatticeUniform:
        case Family::ShiftedBernoulli: {
            const double u = rng.uniform01();
            for (std::size_t i = 0; i < cum_mass_.size(); ++i) {
                if (u <= cum_mass_[i]) return atoms_[i].value;
            }
            return atoms_.back().value;
        }
    }
    throw Error("internal", "unhandled family");
}

double EntryDistribution::fourth_moment() const {
    switch (family_) {
        case Family::StandardGaussian:
            return 3.0;
        case Family::UniformSymmetric:
            return 9.0 / 5.0;  // E U^4 for U uniform on [-sqrt3, sqrt3]
        default: {
            double m4 = 0.0;
            for (const Atom& a : atoms_) m4 += std::pow(a.value, 4) * a.mass;
            return m4;
        }
    }
}

double levy_concentration(const EntryDistribution& dist, double eps) {
    if (eps < 0.0) throw Error("bad-argument", "eps must be >= 0");
    switch (dist.family()) {
        case EntryDistribution::Family::StandardGaussian:
            // Density is unimodal at 0, so the best window is centered there.
            return std::erf(eps / std::sqrt(2.0));
        case EntryDistribution::Family::UniformSymmetric: {
            const double halfwidth = *dist.almost_sure_bound();
            return std::min(1.0, eps / halfwidth);
        }
        case EntryDistribution::Family::Rademacher:
        case EntryDistribution::Family::LatticeUniform:
        case EntryDistribution::Family::ShiftedBernoulli: {
            // Best closed window of width 2*eps over sorted atoms: slide the
            // left endpoint over atom positions.
            const auto& atoms = dist.atoms();
            double best = 0.0;
            for (std::size_t i = 0; i < atoms.size(); ++i) {
                double mass = 0.0;
                for (std::size_t j = i; j < atoms.size(); ++j) {
                    if (atoms[j].value - atoms[i].value <= 2.0 * eps + 1e-15)
                        mass += atoms[j].mass;
                    else
                        break;
                }
                best = std::max(best, mass);
            }
            return std::min(1.0, best);
        }
    }
    throw Error("concentration-unavailable", "no analytic rule for family");
}

EntryDistribution parse_distribution(const std::string& text) {
    if (text == "gaussian") return EntryDistribution::standard_gaussian();
    if (text == "rademacher") return EntryDistribution::rademacher();
    if (text == "uniform") return EntryDistribution::uniform_symmetric();
    if (text.rfind("bernoulli(", 0) == 0 && text.back() == ')') {
        const double p = std::stod(text.substr(10, text.size() - 11));
        return EntryDistribution::shifted_bernoulli(p);
    }
    throw Error("bad-argument", "unknown distribution: " + text);
}

}  // namespace rmlab
