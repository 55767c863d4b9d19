#ifndef PUAL_PUAL_LINEAR_HPP
#define PUAL_PUAL_LINEAR_HPP

#include "pual/common.hpp"
#include "pual/dataset.hpp"
#include "pual/error.hpp"
#include "pual/hyperparams.hpp"
#include "pual/linalg.hpp"
#include "pual/similarity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>
#include <vector>

namespace pual {

/// ADMM splitting variables: slack h = 1_p - (X_p beta + beta0) and its multiplier u_h.
struct AdmmState {
    Vector h;
    Vector u_h;
    int iteration{0};
    double primal_residual{0.0};

    static AdmmState zeros(Eigen::Index n_p) { return AdmmState{Vector::Zero(n_p), Vector::Zero(n_p), 0, 0.0}; }
};

/// Bordered normal equations [[M11, M12], [M21, M22]] [beta; beta0] = [m1; m2].
struct BetaSystem {
    Matrix M11;
    Vector M12;
    Vector M21;  // stored as a column; the row vector of the system is M21^T
    double M22{0.0};
    Vector m1;
    double m2{0.0};
};

struct SolveReport {
    int iterations{0};
    bool converged{false};
    double final_primal_residual{0.0};
    double final_dual_residual{0.0};
    std::vector<double> objective_trace;
};

struct LinearModel {
    Vector beta;
    double beta0{0.0};
    Standardizer standardizer;
};

struct Prediction {
    Vector scores;
    std::vector<int> labels;
};

/// sign(0) = +1.
inline Prediction label_scores(Vector scores) {
    Prediction out{std::move(scores), {}};
    out.labels.reserve(static_cast<std::size_t>(out.scores.size()));
    for (Eigen::Index i = 0; i < out.scores.size(); ++i) {
        out.labels.push_back(out.scores(i) >= 0.0 ? 1 : -1);
    }
    return out;
}

/// Data-only sums that every beta-step reuses.
struct QuadraticPieces {
    Eigen::Index n_p{0};
    Eigen::Index n_u{0};
    Matrix XpTXp;
    Matrix XuTXu;
    Matrix XTRX;
    Vector XpT1;
    Vector XuT1;
    Vector XTR1;     // X^T (R 1)
    RowVector oneRX;  // (1^T R) X
    double oneR1{0.0};
};

inline QuadraticPieces quadratic_pieces(const PUDataset &data, const LaplacianMatrix &lap) {
    if (lap.R.rows() != data.n() || lap.R.cols() != data.n()) {
        throw Error(ErrorKind::DimensionMismatch, "R must be (n_p + n_u) square");
    }
    const Matrix X = data.stacked();
    const Matrix RX = lap.R * X;
    const Vector R1 = lap.R.rowwise().sum();
    QuadraticPieces q;
    q.n_p = data.n_p();
    q.n_u = data.n_u();
    q.XpTXp = data.features_p.transpose() * data.features_p;
    q.XuTXu = data.features_u.transpose() * data.features_u;
    q.XTRX = X.transpose() * RX;
    q.XpT1 = data.features_p.colwise().sum().transpose();
    q.XuT1 = data.features_u.colwise().sum().transpose();
    q.XTR1 = X.transpose() * R1;
    q.oneRX = lap.R.colwise().sum() * X;
    q.oneR1 = R1.sum();
    return q;
}

namespace detail {

/// State-independent blocks of the beta-step system. `positive_weight`
/// multiplies X_p^T X_p: mu1 for PUAL's augmented term, 2 C_p for GLLC's squared loss.
inline BetaSystem system_matrix(const QuadraticPieces &q, const Hyperparams &hp, double positive_weight) {
    const auto m = q.XpTXp.rows();
    BetaSystem s;
    s.M11 = hp.lambda * Matrix::Identity(m, m) + 2.0 * hp.cu * q.XuTXu + 2.0 * q.XTRX + positive_weight * q.XpTXp;
    s.M12 = 2.0 * hp.cu * q.XuT1 + 2.0 * q.XTR1 + positive_weight * q.XpT1;
    s.M21 = 2.0 * hp.cu * q.XuT1 + 2.0 * q.oneRX.transpose() + positive_weight * q.XpT1;
    s.M22 = 2.0 * hp.cu * static_cast<double>(q.n_u) + 2.0 * q.oneR1 + positive_weight * static_cast<double>(q.n_p);
    return s;
}

inline Matrix bordered(const BetaSystem &s) {
    const auto m = s.M11.rows();
    Matrix A(m + 1, m + 1);
    A.topLeftCorner(m, m) = s.M11;
    A.topRightCorner(m, 1) = s.M12;
    A.bottomLeftCorner(1, m) = s.M21.transpose();
    A(m, m) = s.M22;
    return A;
}

/// m1, m2 for the current (h, u_h).
inline void pual_rhs(const Matrix &Xp, const QuadraticPieces &q, const Hyperparams &hp, const AdmmState &state,
                     Vector &m1, double &m2) {
    const Vector slack = Vector::Ones(q.n_p) - state.h;
    m1 = -2.0 * hp.cu * q.XuT1 + Xp.transpose() * (state.u_h + hp.mu1 * slack);
    m2 = -2.0 * hp.cu * static_cast<double>(q.n_u) + state.u_h.sum() + hp.mu1 * slack.sum();
}

inline void check_state(const PUDataset &data, const AdmmState &state) {
    if (state.h.size() != data.n_p() || state.u_h.size() != data.n_p()) {
        throw Error(ErrorKind::DimensionMismatch, "ADMM state length must equal n_p");
    }
}

}  // namespace detail

inline BetaSystem assemble_beta_system(const PUDataset &data, const LaplacianMatrix &R, const Hyperparams &hp,
                                       const AdmmState &state) {
    detail::check_state(data, state);
    const auto q = quadratic_pieces(data, R);
    BetaSystem s = detail::system_matrix(q, hp, hp.mu1);
    detail::pual_rhs(data.features_p, q, hp, state, s.m1, s.m2);
    return s;
}

inline std::pair<Vector, double> solve_beta(const BetaSystem &system) {
    const auto m = system.M11.rows();
    if (system.M12.size() != m || system.M21.size() != m || system.m1.size() != m) {
        throw Error(ErrorKind::DimensionMismatch, "beta system blocks disagree in size");
    }
    const SymmetricSolver solver(detail::bordered(system), m, ErrorKind::SingularSystem);
    Vector rhs(m + 1);
    rhs << system.m1, system.m2;
    const Vector x = solver.solve(rhs);
    return {x.head(m), x(m)};
}

/// argmin_x c [x]_+ + (x - d)^2 / 2.
inline double soft_threshold(double c, double d) {
    if (!(c > 0.0)) {
        throw Error(ErrorKind::NonPositiveC, "threshold must be positive");
    }
    if (d > c) {
        return d - c;
    }
    if (d >= 0.0) {
        return 0.0;
    }
    return d;
}

namespace detail {

inline Vector prox_hinge(double c, const Vector &d) {
    Vector h(d.size());
    for (Eigen::Index i = 0; i < d.size(); ++i) {
        h(i) = soft_threshold(c, d(i));
    }
    return h;
}

}  // namespace detail

/// h from the positives' scores f_p = X_p beta + beta0.
inline Vector update_h_from_scores(const Vector &positive_scores, const Hyperparams &hp, const AdmmState &state) {
    const Vector d = (Vector::Ones(positive_scores.size()) + state.u_h / hp.mu1 - positive_scores).eval();
    return detail::prox_hinge(hp.cp / hp.mu1, d);
}

inline Vector update_h(const PUDataset &data, const Vector &beta, double beta0, const Hyperparams &hp,
                       const AdmmState &state) {
    detail::check_state(data, state);
    const Vector scores = (data.features_p * beta).array() + beta0;
    return update_h_from_scores(scores, hp, state);
}

/// u_h + mu1 (1_p - f_p - h).
inline Vector update_dual_from_scores(const Vector &positive_scores, const AdmmState &state, double mu1) {
    return state.u_h + mu1 * (Vector::Ones(positive_scores.size()) - positive_scores - state.h);
}

inline Vector update_dual(const PUDataset &data, const Vector &beta, double beta0, const AdmmState &state,
                          double mu1) {
    detail::check_state(data, state);
    const Vector scores = (data.features_p * beta).array() + beta0;
    return update_dual_from_scores(scores, state, mu1);
}

/// The PUAL objective: ridge + C_p hinge on X_p + C_u squared loss on X_u + f^T R f.
inline double objective_value(const PUDataset &data, const LaplacianMatrix &R, const Hyperparams &hp,
                              const Vector &beta, double beta0) {
    const Vector fp = (data.features_p * beta).array() + beta0;
    const Vector fu = (data.features_u * beta).array() + beta0;
    const Vector f = (data.stacked() * beta).array() + beta0;
    const double hinge = (1.0 - fp.array()).max(0.0).sum();
    const double squared = (1.0 + fu.array()).square().sum();
    return 0.5 * hp.lambda * beta.squaredNorm() + hp.cp * hinge + hp.cu * squared + f.dot(R.R * f);
}

/// The beta-step objective: the augmented Lagrangian with h and u_h held fixed.
inline double beta_step_objective(const PUDataset &data, const LaplacianMatrix &R, const Hyperparams &hp,
                                  const AdmmState &state, const Vector &beta, double beta0) {
    const Vector fp = (data.features_p * beta).array() + beta0;
    const Vector fu = (data.features_u * beta).array() + beta0;
    const Vector f = (data.stacked() * beta).array() + beta0;
    const Vector residual = Vector::Ones(fp.size()) - fp - state.h;
    return 0.5 * hp.lambda * beta.squaredNorm() + hp.cu * (1.0 + fu.array()).square().sum() + f.dot(R.R * f) +
           state.u_h.dot(residual) + 0.5 * hp.mu1 * residual.squaredNorm();
}

/// A standardized PU problem with its Laplacian and precomputed sums; reused
/// across hyperparameter candidates that share K and sigma.
struct LinearProblem {
    PUDataset data;
    QuadraticPieces pieces;

    LinearProblem(PUDataset standardized, const LaplacianMatrix &lap)
        : data(std::move(standardized)), pieces(quadratic_pieces(data, lap)) {}
};

namespace detail {

inline double objective_from_pieces(const LinearProblem &problem, const Hyperparams &hp, const Vector &beta,
                                    double beta0) {
    const auto &q = problem.pieces;
    const Vector fp = (problem.data.features_p * beta).array() + beta0;
    const Vector fu = (problem.data.features_u * beta).array() + beta0;
    const double local = beta.dot(q.XTRX * beta) + beta0 * (beta.dot(q.XTR1) + q.oneRX.dot(beta)) +
                         beta0 * beta0 * q.oneR1;
    return 0.5 * hp.lambda * beta.squaredNorm() + hp.cp * (1.0 - fp.array()).max(0.0).sum() +
           hp.cu * (1.0 + fu.array()).square().sum() + local;
}

}  // namespace detail

struct LinearFit {
    LinearModel model;
    SolveReport report;
};

/// ADMM from zero initialization. Stops once both the primal residual
/// |1_p - f_p - h| and the dual residual mu1 |h_k - h_{k-1}| are at most tol,
/// or after max_iter outer iterations. The primal residual alone reaches 0
/// whenever every labeled positive clears the margin, before h has settled.
inline LinearFit admm_linear(const LinearProblem &problem, const Hyperparams &hp, const StopCriteria &stop) {
    hp.validate();
    const auto &q = problem.pieces;
    const auto &Xp = problem.data.features_p;
    const Eigen::Index m = problem.data.m();

    LinearFit fit{LinearModel{Vector::Zero(m), 0.0, Standardizer::identity(m)}, SolveReport{}};
    auto &report = fit.report;
    if (stop.max_iter <= 0) {
        return fit;
    }

    BetaSystem system = detail::system_matrix(q, hp, hp.mu1);
    const SymmetricSolver solver(detail::bordered(system), m, ErrorKind::SingularSystem);

    AdmmState state = AdmmState::zeros(q.n_p);
    Vector rhs(m + 1);
    for (int k = 1; k <= stop.max_iter; ++k) {
        detail::pual_rhs(Xp, q, hp, state, system.m1, system.m2);
        rhs << system.m1, system.m2;
        const Vector x = solver.solve(rhs);
        fit.model.beta = x.head(m);
        fit.model.beta0 = x(m);

        const Vector fp = (Xp * fit.model.beta).array() + fit.model.beta0;
        const Vector h_next = update_h_from_scores(fp, hp, state);
        const Vector residual = Vector::Ones(q.n_p) - fp - h_next;
        const Vector dh = h_next - state.h;
        state.u_h += hp.mu1 * residual;
        state.h = h_next;
        state.iteration = k;
        state.primal_residual = residual.norm();

        report.iterations = k;
        report.final_primal_residual = state.primal_residual;
        report.final_dual_residual = hp.mu1 * dh.norm();
        if (stop.record_objective) {
            report.objective_trace.push_back(detail::objective_from_pieces(problem, hp, fit.model.beta, fit.model.beta0));
        }
        if (state.primal_residual <= stop.tol && report.final_dual_residual <= stop.tol) {
            report.converged = true;
            break;
        }
    }
    return fit;
}

/// Standardizes (optionally), builds the mutual-KNN Laplacian on X_[pu], and runs ADMM.
inline LinearFit fit_linear(const PUDataset &data, const Hyperparams &hp, const StopCriteria &stop = {},
                            const TrainOptions &options = {}) {
    data.validate();
    hp.validate();
    const Standardizer standardizer =
        options.standardize ? fit_standardizer(data) : Standardizer::identity(data.m());
    PUDataset scaled = standardizer.apply(data);
    const LaplacianMatrix lap = build_laplacian(scaled.stacked(), hp.knn);
    const LinearProblem problem(std::move(scaled), lap);
    LinearFit result = admm_linear(problem, hp, stop);
    result.model.standardizer = standardizer;
    return result;
}

/// score = x^T beta + beta0 on standardized features; label +1 iff score >= 0.
inline Prediction predict_linear(const LinearModel &model, const Matrix &features) {
    if (features.cols() != model.beta.size()) {
        throw Error(ErrorKind::DimensionMismatch, "model expects " + std::to_string(model.beta.size()) +
                                                      " features, got " + std::to_string(features.cols()));
    }
    const Matrix scaled = model.standardizer.apply(features);
    return label_scores((scaled * model.beta).array() + model.beta0);
}

}  // namespace pual

#endif  // PUAL_PUAL_LINEAR_HPP
