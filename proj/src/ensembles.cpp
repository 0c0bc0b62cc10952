#include "rmlab/ensembles.hpp"

#include <cmath>

#include "rmlab/error.hpp"

namespace rmlab {

namespace {

// Substream tags for the per-trial stream. Entry draws and the interpolation
// GOE must never share a counter range.
constexpr std::uint64_t kEntrySubstream = 0;
constexpr std::uint64_t kInterpolationSubstream = 1;

}  // namespace

void EnsembleSpec::validate() const {
    if (n < 1) throw Error("spec-mismatch", "dimension n must be >= 1");
    if (perturbation_f) {
        if (perturbation_f->rows() != n || perturbation_f->cols() != n)
            throw Error("spec-mismatch", "perturbation F must be n x n");
        if (symmetry == Symmetry::SymmetricWigner &&
            !perturbation_f->isApprox(perturbation_f->transpose(), 1e-12))
            throw Error("spec-mismatch",
                        "perturbation F must be symmetric for Wigner specs");
    }
    if (interpolation_t < 0.0 || interpolation_t > 1.0)
        throw Error("spec-mismatch", "interpolation t must lie in [0, 1]");
    if (interpolation_t != 0.0 && symmetry != Symmetry::SymmetricWigner)
        throw Error("spec-mismatch", "interpolation requires a Wigner spec");
}

RealMatrix sample_iid(const EnsembleSpec& spec, RngStream rng) {
    spec.validate();
    if (spec.symmetry != EnsembleSpec::Symmetry::IID)
        throw Error("spec-mismatch", "sample_iid needs an iid spec");
    const int n = spec.n;
    Prng prng(rng, kEntrySubstream);
    RealMatrix m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = spec.entry.sample(prng);
    if (spec.perturbation_f) m += *spec.perturbation_f;
    return m;
}

RealMatrix sample_goe(int n, RngStream rng) {
    if (n < 1) throw Error("spec-mismatch", "dimension n must be >= 1");
    Prng prng(rng, kEntrySubstream);
    RealMatrix g(n, n);
    for (int i = 0; i < n; ++i) {
        g(i, i) = std::sqrt(2.0) * prng.normal();
        for (int j = i + 1; j < n; ++j) g(i, j) = g(j, i) = prng.normal();
    }
    return g;
}

namespace {

RealMatrix wigner_base(const EnsembleSpec& spec, Prng& prng) {
    const int n = spec.n;
    RealMatrix x(n, n);
    for (int i = 0; i < n; ++i) {
        x(i, i) = spec.diagonal.sample(prng);
        for (int j = i + 1; j < n; ++j) x(i, j) = x(j, i) = spec.entry.sample(prng);
    }
    return x;
}

RealMatrix goe_from_prng(int n, Prng& prng) {
    RealMatrix g(n, n);
    for (int i = 0; i < n; ++i) {
        g(i, i) = std::sqrt(2.0) * prng.normal();
        for (int j = i + 1; j < n; ++j) g(i, j) = g(j, i) = prng.normal();
    }
    return g;
}

}  // namespace

RealMatrix sample_wigner(const EnsembleSpec& spec, RngStream rng) {
    spec.validate();
    if (spec.symmetry != EnsembleSpec::Symmetry::SymmetricWigner)
        throw Error("spec-mismatch", "sample_wigner needs a Wigner spec");
    const int n = spec.n;
    const double t = spec.interpolation_t;

    RealMatrix out;
    if (t == 1.0) {
        Prng goe_prng(rng, kInterpolationSubstream);
        out = goe_from_prng(n, goe_prng);
    } else {
        Prng prng(rng, kEntrySubstream);
        out = wigner_base(spec, prng);
        if (t > 0.0) {
            Prng goe_prng(rng, kInterpolationSubstream);
            out = std::sqrt(1.0 - t) * out + std::sqrt(t) * goe_from_prng(n, goe_prng);
        }
    }
    if (spec.perturbation_f) out += *spec.perturbation_f;
    return out;
}

RealMatrix sample(const EnsembleSpec& spec, RngStream rng) {
    return spec.symmetry == EnsembleSpec::Symmetry::IID ? sample_iid(spec, rng)
                                                        : sample_wigner(spec, rng);
}

}  // namespace rmlab
