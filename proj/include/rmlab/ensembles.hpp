#pragma once

#include <Eigen/Dense>
#include <optional>

#include "rmlab/distributions.hpp"
#include "rmlab/rng.hpp"

namespace rmlab {

using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

/// Full description of a random matrix distribution: entry law, symmetry
/// class, diagonal law, deterministic perturbation F, GOE interpolation t,
/// and the spectral center z used by symmetric experiments.
struct EnsembleSpec {
    enum class Symmetry { IID, SymmetricWigner };

    int n = 0;
    Symmetry symmetry = Symmetry::IID;
    EntryDistribution entry = EntryDistribution::standard_gaussian();
    EntryDistribution diagonal = EntryDistribution::standard_gaussian();
    std::optional<RealMatrix> perturbation_f;
    double interpolation_t = 0.0;
    double center_z = 0.0;

    /// Throws Error("spec-mismatch", ...) when fields are inconsistent
    /// (perturbation shape/symmetry, interpolation on an iid spec, ...).
    void validate() const;
};

/// n x n matrix of iid draws from spec.entry, plus F when configured.
RealMatrix sample_iid(const EnsembleSpec& spec, RngStream rng);

/// Symmetric sample: strict upper triangle iid from spec.entry mirrored,
/// diagonal iid from spec.diagonal. With interpolation t the result is
/// sqrt(1-t) X + sqrt(t) G + F, where G comes from a derived substream so a
/// t-sweep reuses the same X.
RealMatrix sample_wigner(const EnsembleSpec& spec, RngStream rng);

/// GOE sample: symmetric gaussian, off-diagonal variance 1, diagonal
/// variance 2.
RealMatrix sample_goe(int n, RngStream rng);

/// Dispatches on spec.symmetry.
RealMatrix sample(const EnsembleSpec& spec, RngStream rng);

}  // namespace rmlab
