#pragma once

#include <cstdint>

namespace rmlab {

/// Exact (Clopper-Pearson) two-sided binomial confidence interval.
struct BinomialInterval {
    double lo = 0.0;
    double hi = 1.0;
};

/// level is the two-sided coverage, e.g. 0.95. hits = 0 gives lo = 0 and
/// hits = trials gives hi = 1 exactly.
BinomialInterval clopper_pearson(std::uint64_t hits, std::uint64_t trials,
                                 double level);

}  // namespace rmlab
