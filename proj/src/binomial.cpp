#include "rmlab/binomial.hpp"

#include "rmlab/error.hpp"
#include "rmlab/numerics.hpp"

namespace rmlab {

BinomialInterval clopper_pearson(std::uint64_t hits, std::uint64_t trials,
                                 double level) {
    if (trials == 0) throw Error("bad-argument", "trials must be >= 1");
    if (hits > trials) throw Error("bad-argument", "hits exceed trials");
    if (!(level > 0.0 && level < 1.0))
        throw Error("bad-argument", "level must lie in (0, 1)");
    const double alpha = 1.0 - level;
    const double h = static_cast<double>(hits);
    const double n = static_cast<double>(trials);
    BinomialInterval ci;
    ci.lo = hits == 0 ? 0.0 : num::beta_inc_inv(h, n - h + 1.0, 0.5 * alpha);
    ci.hi = hits == trials ? 1.0
                           : num::beta_inc_inv(h + 1.0, n - h, 1.0 - 0.5 * alpha);
    return ci;
}

}  // namespace rmlab
