#include "rmlab/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "rmlab/error.hpp"

namespace rmlab {

namespace {

constexpr double kRankTol = 1e-10;

// Orthonormal basis of the column span, rank-revealing via SVD.
RealMatrix span_basis(const RealMatrix& h) {
    if (h.cols() == 0) return RealMatrix(h.rows(), 0);
    Eigen::BDCSVD<RealMatrix> svd(h, Eigen::ComputeThinU);
    const auto& sv = svd.singularValues();
    const double cutoff = kRankTol * std::max(sv(0), 1e-300);
    int rank = 0;
    while (rank < sv.size() && sv(rank) > cutoff) ++rank;
    return svd.matrixU().leftCols(rank);
}

std::vector<int> sorted_unique(std::vector<int> idx) {
    std::sort(idx.begin(), idx.end());
    idx.erase(std::unique(idx.begin(), idx.end()), idx.end());
    return idx;
}

void check_index_range(const std::vector<int>& idx, int n) {
    if (idx.empty()) throw Error("out-of-range", "index set is empty");
    for (int i : idx)
        if (i < 0 || i >= n) throw Error("out-of-range", "index out of range");
}

// Number of k-subsets of n, saturating at limit+1.
std::size_t binomial_capped(int n, int k, std::size_t limit) {
    if (k < 0 || k > n) return 0;
    std::size_t result = 1;
    for (int i = 1; i <= k; ++i) {
        result = result * static_cast<std::size_t>(n - k + i) / i;
        if (result > limit) return limit + 1;
    }
    return result;
}

bool next_combination(std::vector<int>& c, int n) {
    const int k = static_cast<int>(c.size());
    for (int i = k - 1; i >= 0; --i) {
        if (c[i] < n - k + i) {
            ++c[i];
            for (int j = i + 1; j < k; ++j) c[j] = c[j - 1] + 1;
            return true;
        }
    }
    return false;
}

RealMatrix columns_of(const RealMatrix& z, const std::vector<int>& idx) {
    RealMatrix out(z.rows(), static_cast<Eigen::Index>(idx.size()));
    for (std::size_t j = 0; j < idx.size(); ++j) out.col(j) = z.col(idx[j]);
    return out;
}

double smallest_sv(const RealMatrix& m) {
    Eigen::BDCSVD<RealMatrix> svd(m);
    return svd.singularValues()(svd.singularValues().size() - 1);
}

}  // namespace

double dist_to_colspan(const RealVector& c, const RealMatrix& h_columns) {
    if (h_columns.rows() != c.size())
        throw Error("dimension-mismatch", "vector and span dimensions differ");
    const RealMatrix q = span_basis(h_columns);
    if (q.cols() == 0) return c.norm();
    return (c - q * (q.transpose() * c)).norm();
}

RealVector restrict_coords(const RealVector& v, const std::vector<int>& index_set) {
    const auto idx = sorted_unique(index_set);
    check_index_range(idx, static_cast<int>(v.size()));
    RealVector out(static_cast<Eigen::Index>(idx.size()));
    for (std::size_t i = 0; i < idx.size(); ++i) out(i) = v(idx[i]);
    return out;
}

RealMatrix restrict_rows(const RealMatrix& m, const std::vector<int>& index_set) {
    const auto idx = sorted_unique(index_set);
    check_index_range(idx, static_cast<int>(m.rows()));
    RealMatrix out(static_cast<Eigen::Index>(idx.size()), m.cols());
    for (std::size_t i = 0; i < idx.size(); ++i) out.row(i) = m.row(idx[i]);
    return out;
}

RestrictionCheck check_restriction_monotonicity(const RealVector& c,
                                                const RealMatrix& h_columns,
                                                const std::vector<int>& index_set) {
    RestrictionCheck result;
    result.full = dist_to_colspan(c, h_columns);
    result.restricted = dist_to_colspan(restrict_coords(c, index_set),
                                        restrict_rows(h_columns, index_set));
    result.holds = result.full >= result.restricted - 1e-9;
    return result;
}

CompressVerdict is_compressible(const RealVector& x, const CompressParams& params) {
    if (!(params.c0 > 0.0 && params.c0 < 1.0 && params.c1 > 0.0 && params.c1 < 1.0))
        throw Error("bad-argument", "compress params must lie in (0, 1)");
    if (std::abs(x.norm() - 1.0) > 1e-9)
        throw Error("not-unit", "input vector must have unit norm");
    const int n = static_cast<int>(x.size());
    const int sparse_support = static_cast<int>(std::floor(params.c0 * n));
    std::vector<double> mags(n);
    for (int i = 0; i < n; ++i) mags[i] = std::abs(x(i));
    std::sort(mags.begin(), mags.end(), std::greater<>());
    double tail_sq = 0.0;
    for (int i = sparse_support; i < n; ++i) tail_sq += mags[i] * mags[i];
    CompressVerdict verdict;
    verdict.dist_to_sparse = std::sqrt(tail_sq);
    verdict.compressible = verdict.dist_to_sparse <= params.c1;
    return verdict;
}

double cauchy_binet_residual(const RealMatrix& z, const std::vector<int>& subset_j) {
    const int k = static_cast<int>(z.rows());
    const auto idx = sorted_unique(subset_j);
    check_index_range(idx, static_cast<int>(z.cols()));
    if (static_cast<int>(idx.size()) < k)
        throw Error("subset-too-small", "need |J| >= k");
    const RealMatrix zj = columns_of(z, idx);
    const double lhs = (zj * zj.transpose()).determinant();
    double rhs = 0.0;
    std::vector<int> pick(k);
    std::iota(pick.begin(), pick.end(), 0);
    do {
        RealMatrix minor(k, k);
        for (int j = 0; j < k; ++j) minor.col(j) = zj.col(pick[j]);
        const double det = minor.determinant();
        rhs += det * det;
    } while (next_combination(pick, static_cast<int>(idx.size())));
    return std::abs(lhs - rhs);
}

MinorSelection select_minors_by_determinant(const RealMatrix& z, double theta,
                                            const CompressParams& params,
                                            std::size_t budget) {
    const int k = static_cast<int>(z.rows());
    const int n = static_cast<int>(z.cols());
    if (k < 1 || k > n) throw Error("bad-argument", "need 1 <= k <= n");

    // Bad columns carry too much mass to appear in a well-conditioned minor.
    const double bad_threshold =
        std::sqrt(static_cast<double>(k) / n) / std::sqrt(params.c0);
    std::vector<int> good;
    for (int j = 0; j < n; ++j)
        if (z.col(j).norm() < bad_threshold) good.push_back(j);

    MinorSelection sel;
    sel.good_columns = static_cast<int>(good.size());
    if (static_cast<int>(good.size()) < k) return sel;

    if (binomial_capped(static_cast<int>(good.size()), k, budget) > budget)
        throw Error("too-large", "combinatorial budget exceeded");

    const double det_sq_floor = theta * std::pow(static_cast<double>(n), -k);
    std::size_t enumerated = 0;
    std::vector<int> pick(k);
    std::iota(pick.begin(), pick.end(), 0);
    do {
        ++enumerated;
        RealMatrix minor(k, k);
        for (int j = 0; j < k; ++j) minor.col(j) = z.col(good[pick[j]]);
        const double det = minor.determinant();
        if (det * det >= det_sq_floor) {
            std::vector<int> tuple(k);
            for (int j = 0; j < k; ++j) tuple[j] = good[pick[j]];
            sel.tuples.push_back(std::move(tuple));
        }
    } while (next_combination(pick, static_cast<int>(good.size())));
    sel.fraction_found =
        enumerated == 0 ? 0.0 : static_cast<double>(sel.tuples.size()) / enumerated;
    return sel;
}

std::vector<int> best_minor_by_determinant(const RealMatrix& z, std::size_t budget) {
    const int k = static_cast<int>(z.rows());
    const int n = static_cast<int>(z.cols());
    if (k < 1 || k > n) throw Error("bad-argument", "need 1 <= k <= n");
    if (binomial_capped(n, k, budget) > budget)
        throw Error("too-large", "combinatorial budget exceeded");
    std::vector<int> pick(k);
    std::iota(pick.begin(), pick.end(), 0);
    std::vector<int> best = pick;
    double best_det = -1.0;
    do {
        RealMatrix minor(k, k);
        for (int j = 0; j < k; ++j) minor.col(j) = z.col(pick[j]);
        const double det = std::abs(minor.determinant());
        if (det > best_det) {
            best_det = det;
            best = pick;
        }
    } while (next_combination(pick, n));
    return best;
}

namespace {

SubsetSelection brute_force_select(const RealMatrix& z, int l, std::size_t budget) {
    const int d = static_cast<int>(z.cols());
    if (binomial_capped(d, l, budget) > budget)
        throw Error("too-large", "brute force budget exceeded");
    std::vector<int> pick(l);
    std::iota(pick.begin(), pick.end(), 0);
    std::vector<int> best = pick;
    double best_sigma = -1.0;
    do {
        const double sigma = smallest_sv(columns_of(z, pick));
        if (sigma > best_sigma) {
            best_sigma = sigma;
            best = pick;
        }
    } while (next_combination(pick, d));
    SubsetSelection sel;
    sel.method = SubsetSelection::Method::BruteForce;
    sel.indices = best;
    sel.sigma_min_restricted = best_sigma;
    return sel;
}

SubsetSelection greedy_select(const RealMatrix& z, int l) {
    const int d = static_cast<int>(z.cols());
    SubsetSelection sel;
    sel.method = SubsetSelection::Method::Greedy;
    std::vector<bool> used(d, false);
    std::vector<int> chosen;
    for (int stage = 0; stage < l; ++stage) {
        int best_j = -1;
        double best_sigma = -1.0;
        for (int j = 0; j < d; ++j) {
            if (used[j]) continue;
            std::vector<int> candidate = chosen;
            candidate.push_back(j);
            const double sigma = smallest_sv(columns_of(z, candidate));
            if (sigma > best_sigma + 1e-15) {  // strict gain; lowest index wins ties
                best_sigma = sigma;
                best_j = j;
            }
        }
        used[best_j] = true;
        chosen.push_back(best_j);
    }
    std::sort(chosen.begin(), chosen.end());
    sel.indices = chosen;
    sel.sigma_min_restricted = smallest_sv(columns_of(z, chosen));
    return sel;
}

}  // namespace

SubsetSelection ny_select(const RealMatrix& z, int l, SubsetSelection::Method method,
                          std::size_t brute_force_budget) {
    const int k = static_cast<int>(z.rows());
    const int d = static_cast<int>(z.cols());
    if (k > d) throw Error("bad-argument", "need k <= d");
    if (l < 1 || l >= k) throw Error("bad-l", "need 1 <= l <= k-1");

    Eigen::BDCSVD<RealMatrix> svd(z);
    const auto& sv = svd.singularValues();  // descending, k values
    if (sv(k - 1) <= kRankTol * std::max(sv(0), 1e-300))
        throw Error("rank-deficient", "Z must have full row rank");

    // Tail sums sum_{i=r}^{k} sigma_i^2 with 1-based r.
    std::vector<double> tail(k + 2, 0.0);
    for (int i = k; i >= 1; --i) tail[i] = tail[i + 1] + sv(i - 1) * sv(i - 1);

    const auto bound_at = [&](int r) {
        return std::sqrt(static_cast<double>(d) * r / ((r - l) * tail[r]));
    };
    double bound = std::numeric_limits<double>::infinity();
    for (int r = l + 1; r <= k; ++r) bound = std::min(bound, bound_at(r));
    const int r_mid = (k + l + 1) / 2;  // ceil((k+l)/2), always in [l+1, k]

    SubsetSelection sel = method == SubsetSelection::Method::BruteForce
                              ? brute_force_select(z, l, brute_force_budget)
                              : greedy_select(z, l);
    sel.certified_bound = bound;
    sel.bound_at_midpoint_r = bound_at(r_mid);
    sel.k0_used = 1.0 / (sel.sigma_min_restricted * bound);
    return sel;
}

LengthSquaredSample rv_length_squared_sample(const RealMatrix& x, int d, Prng& rng) {
    const int n = static_cast<int>(x.cols());
    if (d < 1) throw Error("bad-argument", "d must be >= 1");
    std::vector<double> cum(n);
    double total = 0.0;
    for (int j = 0; j < n; ++j) {
        total += x.col(j).squaredNorm();
        cum[j] = total;
    }
    if (total <= 0.0) throw Error("all-zero-matrix", "cannot sample a zero matrix");

    LengthSquaredSample result;
    result.sampled_columns.resize(x.rows(), d);
    result.indices.reserve(d);
    for (int t = 0; t < d; ++t) {
        const double u = rng.uniform01() * total;
        const int j = static_cast<int>(
            std::lower_bound(cum.begin(), cum.end(), u) - cum.begin());
        const int jj = std::min(j, n - 1);
        result.indices.push_back(jj);
        result.sampled_columns.col(t) = x.col(jj) / x.col(jj).norm();
    }

    const RealMatrix target = x * x.transpose();
    const RealMatrix approx = (total / d) * result.sampled_columns *
                              result.sampled_columns.transpose();
    Eigen::SelfAdjointEigenSolver<RealMatrix> es(target - approx,
                                                 Eigen::EigenvaluesOnly);
    result.approx_error = es.eigenvalues().cwiseAbs().maxCoeff();
    return result;
}

RealMatrix stacked_eigvec_matrix(const std::vector<RealVector>& vectors) {
    if (vectors.empty()) throw Error("bad-argument", "need at least one vector");
    const int k = static_cast<int>(vectors.size());
    const int n = static_cast<int>(vectors[0].size());
    RealMatrix z(k, n);
    for (int i = 0; i < k; ++i) {
        if (vectors[i].size() != n)
            throw Error("bad-argument", "vectors must share a dimension");
        z.row(i) = vectors[i].transpose();
    }
    const RealMatrix gram = z * z.transpose();
    if ((gram - RealMatrix::Identity(k, k)).cwiseAbs().maxCoeff() > 1e-9)
        throw Error("not-orthonormal", "rows are not orthonormal to 1e-9");
    const double col_norm_sum = z.squaredNorm();
    if (std::abs(col_norm_sum - k) > 1e-9)
        throw Error("internal", "column norm identity violated");
    return z;
}

}  // namespace rmlab
