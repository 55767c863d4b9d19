#ifndef PUAL_PUAL_KERNEL_HPP
#define PUAL_PUAL_KERNEL_HPP

#include "pual/common.hpp"
#include "pual/dataset.hpp"
#include "pual/error.hpp"
#include "pual/hyperparams.hpp"
#include "pual/linalg.hpp"
#include "pual/pual_linear.hpp"
#include "pual/similarity.hpp"

#include <cmath>
#include <optional>
#include <string>
#include <utility>

namespace pual {

enum class KernelKind { rbf, linear_via_b, precomputed };

inline std::string_view to_string(KernelKind kind) noexcept {
    switch (kind) {
        case KernelKind::rbf: return "rbf";
        case KernelKind::linear_via_b: return "linear-via-b";
        case KernelKind::precomputed: return "precomputed";
    }
    return "unknown";
}

/// rbf: K = exp(-|x - z|^2 / (2 width^2)) is the feature-space inner product,
/// and Phi = K (ridge I + G K)^{-1} follows from B = ridge I + phi^T G phi.
/// linear_via_b: X_k B^{-1} X_pu^T with B the Schur complement of the beta-step
/// system; b_params overrides the fit's C_p, C_u, lambda, mu1 when building B.
/// precomputed: a caller-supplied Gram used as Phi directly.
struct KernelSpec {
    KernelKind kind{KernelKind::rbf};
    double width{1.0};
    std::optional<Hyperparams> b_params;
    double ridge{1.0};

    static KernelSpec rbf(double width, double ridge = 1.0) {
        return KernelSpec{KernelKind::rbf, width, std::nullopt, ridge};
    }
    static KernelSpec linear_via_b(std::optional<Hyperparams> params = std::nullopt) {
        return KernelSpec{KernelKind::linear_via_b, 1.0, params, 1.0};
    }
    static KernelSpec precomputed() { return KernelSpec{KernelKind::precomputed, 1.0, std::nullopt, 1.0}; }

    void validate() const {
        if (kind == KernelKind::rbf) {
            if (!(width > 0.0) || !std::isfinite(width)) {
                throw Error(ErrorKind::NonPositiveWidth, "rbf width must be a positive finite real");
            }
            if (!(ridge > 0.0) || !std::isfinite(ridge)) {
                throw Error(ErrorKind::InvalidArgument, "rbf ridge must be a positive finite real");
            }
        }
    }
};

/// Which loss on X_p shapes B: PUAL's augmented term (mu1) or GLLC's squared loss (2 C_p).
enum class BForm { pual, gllc };

/// Phi(X_p, X_pu), Phi(X_u, X_pu), Phi(X_pu, X_pu).
struct GramBlocks {
    Matrix phi_p;
    Matrix phi_u;
    Matrix phi_pu;

    static GramBlocks from_square(Matrix phi_pu, Eigen::Index n_p) {
        if (phi_pu.rows() != phi_pu.cols() || n_p > phi_pu.rows()) {
            throw Error(ErrorKind::DimensionMismatch, "Gram matrix must be square with side n_p + n_u");
        }
        GramBlocks g;
        g.phi_p = phi_pu.topRows(n_p);
        g.phi_u = phi_pu.bottomRows(phi_pu.rows() - n_p);
        g.phi_pu = std::move(phi_pu);
        return g;
    }
};

struct KernelModel {
    Vector omega;
    double beta0{0.0};
    Matrix train_features;  // standardized X_pu
    KernelSpec kernel;
    Standardizer standardizer;
    Matrix projection;  // B^{-1} X_pu^T, linear_via_b only
    Vector coef;        // (ridge I + G K)^{-1} Omega, rbf only
};

inline Matrix gram_rbf(const Matrix &A, const Matrix &B, double width) {
    if (!(width > 0.0) || !std::isfinite(width)) {
        throw Error(ErrorKind::NonPositiveWidth, "rbf width must be a positive finite real");
    }
    if (A.cols() != B.cols()) {
        throw Error(ErrorKind::DimensionMismatch, "rbf Gram needs equal feature counts");
    }
    const double scale = -1.0 / (2.0 * width * width);
    Matrix K(A.rows(), B.rows());
    for (Eigen::Index j = 0; j < B.rows(); ++j) {
        for (Eigen::Index i = 0; i < A.rows(); ++i) {
            K(i, j) = std::exp(scale * (A.row(i) - B.row(j)).squaredNorm());
        }
    }
    return K;
}

/// B^{-1} X_pu^T, with B = M11 - M12 M21 / M22 for the chosen loss form.
/// Requires n_p > m and n_u > m; B is factorized, never inverted.
inline Matrix linear_via_b_projection(const PUDataset &data, const Hyperparams &hp, const LaplacianMatrix &R,
                                      BForm form = BForm::pual) {
    if (data.n_p() <= data.m() || data.n_u() <= data.m()) {
        throw Error(ErrorKind::InsufficientRank, "linear-via-B Gram needs n_p > m and n_u > m");
    }
    const auto q = quadratic_pieces(data, R);
    const double weight = form == BForm::pual ? hp.mu1 : 2.0 * hp.cp;
    const BetaSystem s = detail::system_matrix(q, hp, weight);
    const Matrix B = s.M11 - s.M12 * s.M21.transpose() / s.M22;
    const SymmetricSolver solver(B, B.rows(), ErrorKind::SingularB);
    return solver.solve(Matrix(data.stacked().transpose()));
}

inline GramBlocks gram_linear_via_B(const PUDataset &data, const Hyperparams &hp, const LaplacianMatrix &R,
                                    BForm form = BForm::pual) {
    const Matrix projection = linear_via_b_projection(data, hp, R, form);
    return GramBlocks::from_square(data.stacked() * projection, data.n_p());
}

namespace detail {

struct KernelScalars {
    double M22{0.0};
    double m2{0.0};
    [[nodiscard]] double ratio() const { return m2 / M22; }
};

inline KernelScalars pual_kernel_scalars(Eigen::Index n_p, Eigen::Index n_u, double oneR1, const Hyperparams &hp,
                                         const AdmmState &state) {
    KernelScalars s;
    s.M22 = 2.0 * hp.cu * static_cast<double>(n_u) + 2.0 * oneR1 + hp.mu1 * static_cast<double>(n_p);
    if (!(std::abs(s.M22) > 0.0) || !std::isfinite(s.M22)) {
        throw Error(ErrorKind::DegenerateM22, "M22 vanished");
    }
    s.m2 = -2.0 * hp.cu * static_cast<double>(n_u) + state.u_h.sum() +
           hp.mu1 * (static_cast<double>(n_p) - state.h.sum());
    return s;
}

/// Omega = [u_h - mu1 c 1_p + mu1 (1_p - h); -2 C_u 1_u - 2 c C_u 1_u] - 2 c R 1, with c = m2 / M22.
inline Vector pual_omega(Eigen::Index n_p, Eigen::Index n_u, const Vector &R1, double c, const Hyperparams &hp,
                         const AdmmState &state) {
    Vector omega(n_p + n_u);
    omega.head(n_p) = state.u_h.array() - hp.mu1 * c + hp.mu1 * (1.0 - state.h.array());
    omega.tail(n_u).setConstant(-2.0 * hp.cu - 2.0 * c * hp.cu);
    omega -= 2.0 * c * R1;
    return omega;
}

}  // namespace detail

inline Vector update_omega(const PUDataset &data, const LaplacianMatrix &R, const Hyperparams &hp,
                           const AdmmState &state) {
    detail::check_state(data, state);
    const Vector R1 = R.R.rowwise().sum();
    const auto s = detail::pual_kernel_scalars(data.n_p(), data.n_u(), R1.sum(), hp, state);
    return detail::pual_omega(data.n_p(), data.n_u(), R1, s.ratio(), hp, state);
}

/// beta0 = m2 / M22 - Q_b / M22 with
/// Q_b = 2 C_u 1^T Phi_u Omega + 2 1^T R Phi_pu Omega + mu1 1^T Phi_p Omega.
inline double update_beta0_kernel(const GramBlocks &grams, const LaplacianMatrix &R, const Hyperparams &hp,
                                  const AdmmState &state, const Vector &omega) {
    const Eigen::Index n_p = grams.phi_p.rows();
    const Eigen::Index n_u = grams.phi_u.rows();
    const auto s = detail::pual_kernel_scalars(n_p, n_u, R.R.sum(), hp, state);
    const double qb = 2.0 * hp.cu * (grams.phi_u * omega).sum() + 2.0 * (R.R * (grams.phi_pu * omega)).sum() +
                      hp.mu1 * (grams.phi_p * omega).sum();
    return s.ratio() - qb / s.M22;
}

inline std::pair<Vector, Vector> update_h_dual_kernel(const GramBlocks &grams, const Hyperparams &hp,
                                                      const AdmmState &state, const Vector &omega, double beta0) {
    const Vector fp = (grams.phi_p * omega).array() + beta0;
    AdmmState next = state;
    next.h = update_h_from_scores(fp, hp, state);
    next.u_h = update_dual_from_scores(fp, next, hp.mu1);
    return {next.h, next.u_h};
}

/// Gram rows and reductions that the kernel iteration reuses.
struct KernelProblem {
    Eigen::Index n_p{0};
    Eigen::Index n_u{0};
    Matrix phi_p;
    RowVector one_phi_p;
    RowVector one_phi_u;
    RowVector one_R_phi;
    Vector R1;
    double oneR1{0.0};

    KernelProblem() = default;

    KernelProblem(const GramBlocks &grams, const LaplacianMatrix &R)
        : n_p(grams.phi_p.rows()),
          n_u(grams.phi_u.rows()),
          phi_p(grams.phi_p),
          one_phi_p(grams.phi_p.colwise().sum()),
          one_phi_u(grams.phi_u.colwise().sum()),
          one_R_phi(R.R.colwise().sum() * grams.phi_pu),
          R1(R.R.rowwise().sum()),
          oneR1(R1.sum()) {
        const Eigen::Index n = n_p + n_u;
        if (grams.phi_pu.rows() != n || grams.phi_pu.cols() != n || grams.phi_p.cols() != n ||
            grams.phi_u.cols() != n || R.R.rows() != n) {
            throw Error(ErrorKind::DimensionMismatch, "Gram blocks and R disagree in size");
        }
    }
};

struct KernelFit {
    KernelModel model;
    SolveReport report;
};

/// Diagonal loss weights that shape B: `p` on X_p rows, `u` on X_u rows.
struct BWeights {
    double p{1.0};
    double u{1.0};

    static BWeights of(const Hyperparams &hp, BForm form) {
        return {form == BForm::pual ? hp.mu1 : 2.0 * hp.cp, 2.0 * hp.cu};
    }
};

/// Symmetric square root S of an rbf Gram over X_pu (positives first) with the
/// row-block products reused across hyperparameters.
class RbfBasis {
  public:
    RbfBasis() = default;

    RbfBasis(const Matrix &K, Eigen::Index n_p) : n_p_(n_p) {
        if (K.rows() != K.cols() || n_p < 1 || n_p >= K.rows()) {
            throw Error(ErrorKind::DimensionMismatch, "rbf Gram must be square with side n_p + n_u");
        }
        const Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (K + K.transpose()));
        if (eig.info() != Eigen::Success) {
            throw Error(ErrorKind::SingularSystem, "eigendecomposition of the rbf Gram failed");
        }
        const Vector root_values = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
        root_ = eig.eigenvectors() * root_values.asDiagonal() * eig.eigenvectors().transpose();
        const Eigen::Index n_u = K.rows() - n_p;
        gram_p_ = root_.topRows(n_p).transpose() * root_.topRows(n_p);
        gram_u_ = root_.bottomRows(n_u).transpose() * root_.bottomRows(n_u);
        sum_p_ = root_.topRows(n_p).colwise().sum().transpose();
        sum_u_ = root_.bottomRows(n_u).colwise().sum().transpose();
    }

    [[nodiscard]] const Matrix &root() const noexcept { return root_; }
    [[nodiscard]] Eigen::Index n_p() const noexcept { return n_p_; }
    [[nodiscard]] Eigen::Index n() const noexcept { return root_.rows(); }
    [[nodiscard]] const Matrix &gram_p() const noexcept { return gram_p_; }
    [[nodiscard]] const Matrix &gram_u() const noexcept { return gram_u_; }
    [[nodiscard]] const Vector &sum_p() const noexcept { return sum_p_; }
    [[nodiscard]] const Vector &sum_u() const noexcept { return sum_u_; }

  private:
    Eigen::Index n_p_{0};
    Matrix root_;
    Matrix gram_p_;  // S_p^T S_p
    Matrix gram_u_;  // S_u^T S_u
    Vector sum_p_;   // S_p^T 1
    Vector sum_u_;   // S_u^T 1
};

/// S R S and S R 1 for one Laplacian.
struct RbfLocal {
    Matrix SRS;
    Vector SR1;
    Vector R1;
    double oneR1{0.0};

    RbfLocal() = default;
    RbfLocal(const RbfBasis &basis, const LaplacianMatrix &R)
        : SRS(basis.root() * R.R * basis.root()),
          R1(R.R.rowwise().sum()),
          oneR1(R1.sum()) {
        SR1 = basis.root() * R1;
    }
};

/// Phi = S C^{-1} S with C = ridge I + S G S and
/// G = D - (D 1)(D 1)^T / (1^T D 1), D = diag(p 1_p, u 1_u) + 2 R.
class RbfImplied {
  public:
    RbfImplied(const RbfBasis &basis, const RbfLocal &local, BWeights weights, double ridge, bool with_rows = true)
        : basis_(&basis), local_(&local), weights_(weights), ridge_(ridge) {
        if (!(ridge > 0.0) || !std::isfinite(ridge)) {
            throw Error(ErrorKind::InvalidArgument, "rbf ridge must be a positive finite real");
        }
        const Eigen::Index n_p = basis.n_p();
        const Eigen::Index n = basis.n();
        M22_ = weights.p * static_cast<double>(n_p) + weights.u * static_cast<double>(n - n_p) + 2.0 * local.oneR1;
        if (!(std::abs(M22_) > 0.0) || !std::isfinite(M22_)) {
            throw Error(ErrorKind::DegenerateM22, "M22 vanished");
        }
        const Vector Sw = weights.p * basis.sum_p() + weights.u * basis.sum_u() + 2.0 * local.SR1;
        Matrix C = weights.p * basis.gram_p() + weights.u * basis.gram_u() + 2.0 * local.SRS;
        C.noalias() -= Sw * Sw.transpose() / M22_;
        C.diagonal().array() += ridge;
        llt_.compute(C);
        if (llt_.info() != Eigen::Success) {
            throw Error(ErrorKind::SingularB, "ridge I + S G S is not positive definite");
        }

        const Matrix &S = basis.root();
        problem_.n_p = n_p;
        problem_.n_u = n - n_p;
        problem_.R1 = local.R1;
        problem_.oneR1 = local.oneR1;
        problem_.one_phi_p = (S * llt_.solve(basis.sum_p())).transpose();
        problem_.one_phi_u = (S * llt_.solve(basis.sum_u())).transpose();
        problem_.one_R_phi = (S * llt_.solve(local.SR1)).transpose();
        if (with_rows) {
            const Matrix T = llt_.solve(Matrix(S.topRows(n_p).transpose()));
            problem_.phi_p = T.transpose() * S;
        }
    }

    [[nodiscard]] const KernelProblem &problem() const noexcept { return problem_; }

    /// Phi v.
    [[nodiscard]] Vector apply(const Vector &v) const {
        const Matrix &S = basis_->root();
        return S * llt_.solve(S * v);
    }

    /// Full Phi(X_pu, X_pu).
    [[nodiscard]] Matrix phi() const {
        const Matrix &S = basis_->root();
        return S * llt_.solve(S);
    }

    /// a with K a = Phi Omega, so that Phi(x*, X_pu) Omega = K(x*, X_pu) a.
    [[nodiscard]] Vector coefficients(const Vector &omega, const LaplacianMatrix &R) const {
        const Eigen::Index n_p = basis_->n_p();
        const Vector v = apply(omega);
        Vector Gv = 2.0 * (R.R * v);
        Gv.head(n_p) += weights_.p * v.head(n_p);
        Gv.tail(v.size() - n_p) += weights_.u * v.tail(v.size() - n_p);
        Vector w = 2.0 * local_->R1;
        w.head(n_p).array() += weights_.p;
        w.tail(v.size() - n_p).array() += weights_.u;
        Gv -= w * (w.dot(v) / M22_);
        return (omega - Gv) / ridge_;
    }

  private:
    const RbfBasis *basis_;
    const RbfLocal *local_;
    BWeights weights_;
    double ridge_;
    double M22_{0.0};
    Eigen::LLT<Matrix> llt_;
    KernelProblem problem_;
};

/// Omega -> beta0 -> (h, u_h) from zero initialization, with the same stopping
/// rule as admm_linear. The trace records the primal residual of each iteration.
inline KernelFit admm_kernel(const KernelProblem &problem, const Hyperparams &hp, const StopCriteria &stop) {
    const Eigen::Index n = problem.n_p + problem.n_u;
    KernelFit fit{KernelModel{Vector::Zero(n), 0.0, Matrix{}, KernelSpec{}, Standardizer{}, Matrix{}, Vector{}}, SolveReport{}};
    auto &report = fit.report;
    if (stop.max_iter <= 0) {
        return fit;
    }
    AdmmState state = AdmmState::zeros(problem.n_p);
    for (int k = 1; k <= stop.max_iter; ++k) {
        const auto s = detail::pual_kernel_scalars(problem.n_p, problem.n_u, problem.oneR1, hp, state);
        const double c = s.ratio();
        fit.model.omega = detail::pual_omega(problem.n_p, problem.n_u, problem.R1, c, hp, state);
        const auto &omega = fit.model.omega;
        const double qb = 2.0 * hp.cu * problem.one_phi_u.dot(omega) + 2.0 * problem.one_R_phi.dot(omega) +
                          hp.mu1 * problem.one_phi_p.dot(omega);
        fit.model.beta0 = c - qb / s.M22;

        const Vector fp = (problem.phi_p * omega).array() + fit.model.beta0;
        const Vector h_next = update_h_from_scores(fp, hp, state);
        const Vector residual = Vector::Ones(problem.n_p) - fp - h_next;
        const Vector dh = h_next - state.h;
        state.u_h += hp.mu1 * residual;
        state.h = h_next;
        state.iteration = k;
        state.primal_residual = residual.norm();

        report.iterations = k;
        report.final_primal_residual = state.primal_residual;
        report.final_dual_residual = hp.mu1 * dh.norm();
        if (stop.record_objective) {
            report.objective_trace.push_back(state.primal_residual);
        }
        if (state.primal_residual <= stop.tol && report.final_dual_residual <= stop.tol) {
            report.converged = true;
            break;
        }
    }
    return fit;
}

namespace detail {

inline Hyperparams b_hyperparams(const KernelSpec &kernel, const Hyperparams &hp) {
    if (!kernel.b_params) {
        return hp;
    }
    Hyperparams b = *kernel.b_params;
    b.knn = hp.knn;
    b.validate();
    return b;
}

}  // namespace detail

/// Standardizes, builds R on the standardized X_pu, assembles the Gram blocks
/// for the requested kernel and iterates. Precomputed kernels go through
/// fit_kernel_precomputed.
inline KernelFit fit_kernel(const PUDataset &data, const Hyperparams &hp, const KernelSpec &kernel,
                            const StopCriteria &stop = {}, const TrainOptions &options = {}) {
    data.validate();
    hp.validate();
    kernel.validate();
    if (kernel.kind == KernelKind::precomputed) {
        throw Error(ErrorKind::InvalidArgument, "precomputed kernels need the Gram matrix; use fit_kernel_precomputed");
    }
    const Standardizer standardizer =
        options.standardize ? fit_standardizer(data) : Standardizer::identity(data.m());
    const PUDataset scaled = standardizer.apply(data);
    const Matrix X = scaled.stacked();
    const LaplacianMatrix lap = build_laplacian(X, hp.knn);

    KernelFit result;
    if (kernel.kind == KernelKind::rbf) {
        const RbfBasis basis(gram_rbf(X, X, kernel.width), scaled.n_p());
        const RbfLocal local(basis, lap);
        const RbfImplied implied(basis, local, BWeights::of(hp, BForm::pual), kernel.ridge);
        result = admm_kernel(implied.problem(), hp, stop);
        result.model.coef = implied.coefficients(result.model.omega, lap);
    } else {
        Matrix projection = linear_via_b_projection(scaled, detail::b_hyperparams(kernel, hp), lap, BForm::pual);
        result = admm_kernel(KernelProblem(GramBlocks::from_square(X * projection, scaled.n_p()), lap), hp, stop);
        result.model.projection = std::move(projection);
    }
    result.model.train_features = X;
    result.model.kernel = kernel;
    result.model.standardizer = standardizer;
    return result;
}

/// `gram` is Phi(X_pu, X_pu) with rows and columns ordered positives first.
inline KernelFit fit_kernel_precomputed(const PUDataset &data, const Hyperparams &hp, const Matrix &gram,
                                        const StopCriteria &stop = {}, const TrainOptions &options = {}) {
    data.validate();
    hp.validate();
    if (gram.rows() != data.n() || gram.cols() != data.n()) {
        throw Error(ErrorKind::DimensionMismatch, "precomputed Gram must be " + std::to_string(data.n()) + " square");
    }
    const Standardizer standardizer =
        options.standardize ? fit_standardizer(data) : Standardizer::identity(data.m());
    const Matrix X = standardizer.apply(data.stacked());
    const LaplacianMatrix lap = build_laplacian(X, hp.knn);
    KernelFit result = admm_kernel(KernelProblem(GramBlocks::from_square(gram, data.n_p()), lap), hp, stop);
    result.model.train_features = X;
    result.model.kernel = KernelSpec::precomputed();
    result.model.standardizer = standardizer;
    return result;
}

/// Kernel rows against X_pu for new raw rows: Phi(x*, X_pu) for linear_via_b,
/// the base Gram K(x*, X_pu) for rbf.
inline Matrix kernel_rows(const KernelModel &model, const Matrix &features) {
    if (model.kernel.kind == KernelKind::precomputed) {
        throw Error(ErrorKind::UnsupportedForPrecomputed, "a precomputed Gram cannot score new instances");
    }
    if (features.cols() != model.train_features.cols()) {
        throw Error(ErrorKind::DimensionMismatch, "model expects " + std::to_string(model.train_features.cols()) +
                                                      " features, got " + std::to_string(features.cols()));
    }
    const Matrix scaled = model.standardizer.apply(features);
    if (model.kernel.kind == KernelKind::rbf) {
        return gram_rbf(scaled, model.train_features, model.kernel.width);
    }
    return scaled * model.projection;
}

/// score = Phi(x*, X_pu) Omega + beta0; label +1 iff score >= 0.
inline Prediction predict_kernel(const KernelModel &model, const Matrix &features) {
    const Matrix rows = kernel_rows(model, features);
    const Vector &weights = model.kernel.kind == KernelKind::rbf ? model.coef : model.omega;
    return label_scores((rows * weights).array() + model.beta0);
}

}  // namespace pual

#endif  // PUAL_PUAL_KERNEL_HPP
