#ifndef PUAL_SIMILARITY_HPP
#define PUAL_SIMILARITY_HPP

#include "pual/common.hpp"
#include "pual/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

namespace pual {

/// Largest training set for which the dense n x n matrices are built.
inline constexpr Eigen::Index max_dense_instances = 5000;

struct KnnParams {
    int k{5};
    double sigma{1.0};

    void validate(Eigen::Index n) const {
        if (n < 2) {
            throw Error(ErrorKind::TooFewInstances, "similarity graph needs at least two instances");
        }
        if (!(sigma > 0.0) || !std::isfinite(sigma)) {
            throw Error(ErrorKind::NonPositiveSigma, "sigma must be a positive finite real");
        }
        if (k < 1 || k >= n) {
            throw Error(ErrorKind::InvalidArgument,
                        "K must satisfy 1 <= K < n (K=" + std::to_string(k) + ", n=" + std::to_string(n) + ")");
        }
    }
};

/// Pairs (i < j) that are among each other's K nearest neighbours, with their squared distance.
struct MutualNeighbors {
    Eigen::Index n{0};
    std::vector<std::pair<Eigen::Index, Eigen::Index>> edges;
    std::vector<double> squared_distances;
};

struct SimilarityGraph {
    Matrix W;
};

struct LaplacianMatrix {
    Matrix R;
};

inline double squared_distance(const Eigen::Ref<const RowVector> &a, const Eigen::Ref<const RowVector> &b) {
    return (a - b).squaredNorm();
}

/// Neighbour lists exclude the point itself; distance ties go to the lower row index.
inline MutualNeighbors mutual_knn(const Matrix &X, int k) {
    const Eigen::Index n = X.rows();
    KnnParams{k, 1.0}.validate(n);
    if (n > max_dense_instances) {
        throw Error(ErrorKind::InvalidArgument, "dense similarity graph limited to " +
                                                    std::to_string(max_dense_instances) + " instances");
    }
    Matrix dist(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        dist(i, i) = 0.0;
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const double d = squared_distance(X.row(i), X.row(j));
            dist(i, j) = d;
            dist(j, i) = d;
        }
    }

    const auto kk = static_cast<std::size_t>(k);
    std::vector<std::vector<Eigen::Index>> nearest(static_cast<std::size_t>(n));
    std::vector<Eigen::Index> candidates;
    for (Eigen::Index i = 0; i < n; ++i) {
        candidates.clear();
        for (Eigen::Index j = 0; j < n; ++j) {
            if (j != i) {
                candidates.push_back(j);
            }
        }
        const auto closer = [&](Eigen::Index a, Eigen::Index b) {
            return dist(i, a) < dist(i, b) || (dist(i, a) == dist(i, b) && a < b);
        };
        std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(kk), candidates.end(),
                          closer);
        auto &list = nearest[static_cast<std::size_t>(i)];
        list.assign(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(kk));
        std::sort(list.begin(), list.end());
    }

    MutualNeighbors result{n, {}, {}};
    for (Eigen::Index i = 0; i < n; ++i) {
        for (const auto j : nearest[static_cast<std::size_t>(i)]) {
            if (j > i) {
                const auto &back = nearest[static_cast<std::size_t>(j)];
                if (std::binary_search(back.begin(), back.end(), i)) {
                    result.edges.emplace_back(i, j);
                    result.squared_distances.push_back(dist(i, j));
                }
            }
        }
    }
    return result;
}

/// w_ij = exp(-|x_i - x_j|^2 / sigma) on mutual-neighbour pairs, 0 elsewhere.
inline SimilarityGraph similarity_weights(const MutualNeighbors &neighbors, double sigma) {
    if (!(sigma > 0.0) || !std::isfinite(sigma)) {
        throw Error(ErrorKind::NonPositiveSigma, "sigma must be a positive finite real");
    }
    SimilarityGraph graph{Matrix::Zero(neighbors.n, neighbors.n)};
    for (std::size_t e = 0; e < neighbors.edges.size(); ++e) {
        const auto [i, j] = neighbors.edges[e];
        const double w = std::exp(-neighbors.squared_distances[e] / sigma);
        graph.W(i, j) = w;
        graph.W(j, i) = w;
    }
    return graph;
}

inline SimilarityGraph mutual_knn_weights(const Matrix &X, const KnnParams &params) {
    params.validate(X.rows());
    return similarity_weights(mutual_knn(X, params.k), params.sigma);
}

/// R = (W* - W) / n with W* the diagonal of column sums of W.
inline LaplacianMatrix laplacian(const SimilarityGraph &graph) {
    const Eigen::Index n = graph.W.rows();
    LaplacianMatrix lap{-graph.W};
    const RowVector column_sums = graph.W.colwise().sum();
    lap.R.diagonal() += column_sums.transpose();
    lap.R /= static_cast<double>(n);
    return lap;
}

inline LaplacianMatrix build_laplacian(const Matrix &X, const KnnParams &params) {
    return laplacian(mutual_knn_weights(X, params));
}

}  // namespace pual

#endif  // PUAL_SIMILARITY_HPP
