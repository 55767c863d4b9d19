#ifndef PUAL_GLLC_HPP
#define PUAL_GLLC_HPP

#include "pual/common.hpp"
#include "pual/dataset.hpp"
#include "pual/hyperparams.hpp"
#include "pual/linalg.hpp"
#include "pual/pual_kernel.hpp"
#include "pual/pual_linear.hpp"
#include "pual/similarity.hpp"

#include <utility>
#include <variant>

namespace pual {

/// Global-and-local baseline: squared loss on both blocks plus f^T R f.
/// Holds either (beta, beta0) or (Omega, beta0).
struct GllcModel {
    std::variant<LinearModel, KernelModel> params;

    [[nodiscard]] bool is_kernel() const noexcept { return std::holds_alternative<KernelModel>(params); }
};

inline double gllc_objective(const PUDataset &data, const LaplacianMatrix &R, const Hyperparams &hp,
                             const Vector &beta, double beta0) {
    const Vector fp = (data.features_p * beta).array() + beta0;
    const Vector fu = (data.features_u * beta).array() + beta0;
    const Vector f = (data.stacked() * beta).array() + beta0;
    return 0.5 * hp.lambda * beta.squaredNorm() + hp.cp * (1.0 - fp.array()).square().sum() +
           hp.cu * (1.0 + fu.array()).square().sum() + f.dot(R.R * f);
}

/// Normal equations of the GLLC objective in (beta, beta0); positive block weight 2 C_p.
inline BetaSystem gllc_system(const QuadraticPieces &q, const Hyperparams &hp) {
    BetaSystem s = detail::system_matrix(q, hp, 2.0 * hp.cp);
    s.m1 = 2.0 * hp.cp * q.XpT1 - 2.0 * hp.cu * q.XuT1;
    s.m2 = 2.0 * hp.cp * static_cast<double>(q.n_p) - 2.0 * hp.cu * static_cast<double>(q.n_u);
    return s;
}

inline LinearModel gllc_linear_solve(const LinearProblem &problem, const Hyperparams &hp) {
    hp.validate();
    const auto [beta, beta0] = solve_beta(gllc_system(problem.pieces, hp));
    return LinearModel{beta, beta0, Standardizer::identity(problem.data.m())};
}

inline GllcModel fit_gllc_linear(const PUDataset &data, const Hyperparams &hp, const TrainOptions &options = {}) {
    data.validate();
    hp.validate();
    const Standardizer standardizer =
        options.standardize ? fit_standardizer(data) : Standardizer::identity(data.m());
    PUDataset scaled = standardizer.apply(data);
    const LaplacianMatrix lap = build_laplacian(scaled.stacked(), hp.knn);
    LinearModel model = gllc_linear_solve(LinearProblem(std::move(scaled), lap), hp);
    model.standardizer = standardizer;
    return GllcModel{std::move(model)};
}

/// Kernel form of the closed-form solution. Eliminating beta0 from the normal
/// equations gives B beta = X^T Omega with the data-free weights
///   Omega = [2 C_p (1 - c) 1_p; -2 C_u (1 + c) 1_u] - 2 c R 1,  c = m2 / M22,
/// and beta0 = c - Q_b / M22 with Q_b = 2 C_p 1^T Phi_p Omega
/// + 2 C_u 1^T Phi_u Omega + 2 1^T R Phi_pu Omega.
inline std::pair<Vector, double> gllc_kernel_solve(const KernelProblem &problem, const Hyperparams &hp) {
    hp.validate();
    const auto n_p = static_cast<double>(problem.n_p);
    const auto n_u = static_cast<double>(problem.n_u);
    const double M22 = 2.0 * hp.cp * n_p + 2.0 * hp.cu * n_u + 2.0 * problem.oneR1;
    if (!(std::abs(M22) > 0.0)) {
        throw Error(ErrorKind::DegenerateM22, "M22 vanished");
    }
    const double c = (2.0 * hp.cp * n_p - 2.0 * hp.cu * n_u) / M22;
    Vector omega(problem.n_p + problem.n_u);
    omega.head(problem.n_p).setConstant(2.0 * hp.cp * (1.0 - c));
    omega.tail(problem.n_u).setConstant(-2.0 * hp.cu * (1.0 + c));
    omega -= 2.0 * c * problem.R1;
    const double qb = 2.0 * hp.cp * problem.one_phi_p.dot(omega) + 2.0 * hp.cu * problem.one_phi_u.dot(omega) +
                      2.0 * problem.one_R_phi.dot(omega);
    return {omega, c - qb / M22};
}

inline GllcModel fit_gllc_kernel(const PUDataset &data, const Hyperparams &hp, const KernelSpec &kernel,
                                 const TrainOptions &options = {}) {
    data.validate();
    hp.validate();
    kernel.validate();
    if (kernel.kind == KernelKind::precomputed) {
        throw Error(ErrorKind::InvalidArgument, "GLLC kernel fits take rbf or linear-via-B kernels");
    }
    const Standardizer standardizer =
        options.standardize ? fit_standardizer(data) : Standardizer::identity(data.m());
    const PUDataset scaled = standardizer.apply(data);
    const Matrix X = scaled.stacked();
    const LaplacianMatrix lap = build_laplacian(X, hp.knn);

    if (kernel.kind == KernelKind::rbf) {
        const RbfBasis basis(gram_rbf(X, X, kernel.width), scaled.n_p());
        const RbfLocal local(basis, lap);
        const RbfImplied implied(basis, local, BWeights::of(hp, BForm::gllc), kernel.ridge, false);
        auto [omega, beta0] = gllc_kernel_solve(implied.problem(), hp);
        Vector coef = implied.coefficients(omega, lap);
        return GllcModel{KernelModel{std::move(omega), beta0, X, kernel, standardizer, Matrix{}, std::move(coef)}};
    }
    Matrix projection = linear_via_b_projection(scaled, detail::b_hyperparams(kernel, hp), lap, BForm::gllc);
    auto [omega, beta0] =
        gllc_kernel_solve(KernelProblem(GramBlocks::from_square(X * projection, scaled.n_p()), lap), hp);
    return GllcModel{KernelModel{std::move(omega), beta0, X, kernel, standardizer, std::move(projection), Vector{}}};
}

inline Prediction predict(const GllcModel &model, const Matrix &features) {
    if (const auto *linear = std::get_if<LinearModel>(&model.params)) {
        return predict_linear(*linear, features);
    }
    return predict_kernel(std::get<KernelModel>(model.params), features);
}

}  // namespace pual

#endif  // PUAL_GLLC_HPP
