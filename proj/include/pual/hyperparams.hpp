#ifndef PUAL_HYPERPARAMS_HPP
#define PUAL_HYPERPARAMS_HPP

#include "pual/error.hpp"
#include "pual/similarity.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace pual {

/// C_p, C_u and lambda weight the objective; mu1 is the ADMM step size.
/// For rbf-kernel fits lambda is the kernel width instead of the ridge weight.
struct Hyperparams {
    double cp{1.0};
    double cu{0.1};
    double lambda{1.0};
    double mu1{1.0};
    KnnParams knn{5, 1.0};

    void validate() const {
        const auto positive = [](double v) { return v > 0.0 && std::isfinite(v); };
        if (!positive(cp) || !positive(cu) || !positive(lambda) || !positive(mu1)) {
            throw Error(ErrorKind::InvalidArgument, "C_p, C_u, lambda and mu1 must be positive finite reals");
        }
        if (!positive(knn.sigma)) {
            throw Error(ErrorKind::NonPositiveSigma, "sigma must be a positive finite real");
        }
        if (knn.k < 1) {
            throw Error(ErrorKind::InvalidArgument, "K must be at least 1");
        }
    }
};

struct StopCriteria {
    double tol{1e-6};
    int max_iter{2000};
    bool record_objective{true};
};

struct TrainOptions {
    bool standardize{true};
};

inline constexpr double singular_rcond = 1e-12;

}  // namespace pual

#endif  // PUAL_HYPERPARAMS_HPP
