#ifndef PUAL_TESTS_SUPPORT_HPP
#define PUAL_TESTS_SUPPORT_HPP

#include "pual/dataset.hpp"
#include "pual/random.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

namespace pual::testing {

/// Gaussian blobs: positives around +shift, unlabeled a mix around +shift and -shift.
inline PUDataset random_problem(SplitMix64 &rng, Eigen::Index n_p, Eigen::Index n_u, Eigen::Index m,
                                double shift = 1.5) {
    PUDataset data{Matrix(n_p, m), Matrix(n_u, m), {}};
    for (Eigen::Index i = 0; i < n_p; ++i) {
        for (Eigen::Index c = 0; c < m; ++c) {
            data.features_p(i, c) = shift + rng.normal_pair().first;
        }
    }
    for (Eigen::Index i = 0; i < n_u; ++i) {
        const double centre = rng.uniform() < 0.3 ? shift : -shift;
        for (Eigen::Index c = 0; c < m; ++c) {
            data.features_u(i, c) = centre + rng.normal_pair().first;
        }
    }
    return data;
}

inline Eigen::Index uniform_int(SplitMix64 &rng, Eigen::Index lo, Eigen::Index hi) {
    return lo + static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(hi - lo + 1)));
}

/// Central differences of f at x.
inline Vector numeric_gradient(const std::function<double(const Vector &)> &f, const Vector &x, double step) {
    Vector g(x.size());
    Vector probe = x;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        probe(i) = x(i) + step;
        const double up = f(probe);
        probe(i) = x(i) - step;
        const double down = f(probe);
        probe(i) = x(i);
        g(i) = (up - down) / (2.0 * step);
    }
    return g;
}

/// argmin over the grid lo, lo + step, ..., hi.
inline double grid_argmin(const std::function<double(double)> &f, double lo, double hi, double step) {
    double best_x = lo;
    double best_f = std::numeric_limits<double>::infinity();
    const auto count = static_cast<long>(std::llround((hi - lo) / step));
    for (long i = 0; i <= count; ++i) {
        const double x = lo + static_cast<double>(i) * step;
        const double v = f(x);
        if (v < best_f) {
            best_f = v;
            best_x = x;
        }
    }
    return best_x;
}

}  // namespace pual::testing

#endif  // PUAL_TESTS_SUPPORT_HPP
