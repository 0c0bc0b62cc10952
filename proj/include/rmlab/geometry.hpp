#pragma once

#include <vector>

#include "rmlab/ensembles.hpp"
#include "rmlab/rng.hpp"

namespace rmlab {

/// Sparsity fraction c0 and distance threshold c1 for the compressible /
/// incompressible split of the unit sphere.
struct CompressParams {
    double c0 = 0.1;
    double c1 = 0.1;
};

/// Result of a column subset selection.
struct SubsetSelection {
    enum class Method { BruteForce, Greedy, LengthSquaredSampling };

    std::vector<int> indices;            // increasing
    double sigma_min_restricted = 0.0;   // sigma_l of the selected columns
    double certified_bound = 0.0;        // min over r of sqrt(d r / ((r-l) tail))
    double bound_at_midpoint_r = 0.0;    // same bound at r = ceil((k+l)/2)
    double k0_used = 0.0;                // minimal constant making the bound hold
    bool indices_distinct = true;
    Method method = Method::BruteForce;
};

/// Euclidean distance from c to the span of the columns of H, via an
/// orthonormal basis of the span with rank tolerance 1e-10.
double dist_to_colspan(const RealVector& c, const RealMatrix& h_columns);

/// Coordinates of v indexed by I (0-based, strictly increasing output order).
RealVector restrict_coords(const RealVector& v, const std::vector<int>& index_set);

/// Restrict every row of a matrix to the index set.
RealMatrix restrict_rows(const RealMatrix& m, const std::vector<int>& index_set);

struct RestrictionCheck {
    double full = 0.0;        // dist(c, H)
    double restricted = 0.0;  // dist(c_I, H_I)
    bool holds = false;       // full >= restricted - 1e-9
};

/// Distance to a span never grows when both the point and the span are
/// projected onto a coordinate subset.
RestrictionCheck check_restriction_monotonicity(const RealVector& c,
                                                const RealMatrix& h_columns,
                                                const std::vector<int>& index_set);

struct CompressVerdict {
    bool compressible = false;
    double dist_to_sparse = 0.0;
};

/// Distance from a unit vector to the set of floor(c0 n)-sparse vectors is
/// the norm of everything outside its largest-magnitude coordinates.
CompressVerdict is_compressible(const RealVector& x, const CompressParams& params);

/// | det(Z_J Z_J^T) - sum over k-subsets S of J of det(Z_S)^2 |.
double cauchy_binet_residual(const RealMatrix& z, const std::vector<int>& subset_j);

struct MinorSelection {
    std::vector<std::vector<int>> tuples;  // k-subsets, each increasing
    double fraction_found = 0.0;           // tuples found / subsets enumerated
    int good_columns = 0;
};

/// Filters out columns with norm >= c0^{-1/2} sqrt(k/n), enumerates k-subsets
/// of the survivors, and keeps those with det^2 >= theta * n^{-k}.
MinorSelection select_minors_by_determinant(const RealMatrix& z, double theta,
                                            const CompressParams& params,
                                            std::size_t budget = 1000000);

/// The k-subset of columns maximizing |det(Z_S)|, by exhaustive enumeration.
std::vector<int> best_minor_by_determinant(const RealMatrix& z,
                                           std::size_t budget = 1000000);

/// Picks l columns of a full-rank k x d matrix whose restricted smallest
/// singular value is large; certifies against the restricted-invertibility
/// bound min_r sqrt(d r / ((r - l) * sum_{i>=r} sigma_i^2)).
SubsetSelection ny_select(const RealMatrix& z, int l, SubsetSelection::Method method,
                          std::size_t brute_force_budget = 1000000);

struct LengthSquaredSample {
    RealMatrix sampled_columns;  // k x d, unit-normalized
    std::vector<int> indices;    // multiset, in draw order
    double approx_error = 0.0;   // |X X^T - (|X|_F^2 / d) Xt Xt^T|_2
};

/// Draws d columns with replacement, probability proportional to squared
/// length, each normalized to unit length.
LengthSquaredSample rv_length_squared_sample(const RealMatrix& x, int d, Prng& rng);

/// Stacks k orthonormal n-vectors as rows; checks orthonormality to 1e-9 and
/// the column-norm identity sum_i |y_i|^2 = k.
RealMatrix stacked_eigvec_matrix(const std::vector<RealVector>& vectors);

}  // namespace rmlab
