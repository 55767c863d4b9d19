#include "pual/pual_kernel.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace pual;

namespace {

Hyperparams small_hp() {
    Hyperparams hp;
    hp.lambda = 0.5;
    hp.cu = 0.2;
    hp.knn = {3, 1.0};
    return hp;
}

}  // namespace

TEST(GramRbf, Examples) {
    Matrix A(2, 2);
    A << 0.0, 0.0, 1.0, 1.0;  // distance sqrt(2)
    const Matrix K = gram_rbf(A, A, 1.0);
    EXPECT_EQ(K(0, 0), 1.0);
    EXPECT_NEAR(K(0, 1), std::exp(-1.0), 1e-15);
    try {
        gram_rbf(A, A, 0.0);
        FAIL();
    } catch (const Error &e) {
        EXPECT_EQ(e.kind(), ErrorKind::NonPositiveWidth);
    }
}

TEST(GramRbf, SymmetricPsd) {
    SplitMix64 rng(3);
    for (int trial = 0; trial < 10; ++trial) {
        const auto n = pual::testing::uniform_int(rng, 5, 80);
        Matrix X(n, 3);
        for (Eigen::Index i = 0; i < X.size(); ++i) {
            X.data()[i] = rng.normal_pair().first;
        }
        const Matrix K = gram_rbf(X, X, 0.3 + rng.uniform());
        EXPECT_EQ(K, K.transpose());
        const Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (K + K.transpose()));
        EXPECT_GE(eig.eigenvalues().minCoeff(), -1e-8);
    }
}

TEST(LinearViaB, HandExampleB) {
    const PUDataset data{Matrix::Constant(1, 1, 1.0), Matrix::Constant(1, 1, -1.0), {}};
    const LaplacianMatrix R{Matrix::Zero(2, 2)};
    const Hyperparams hp{1.0, 1.0, 1.0, 1.0, {1, 1.0}};
    const auto s = detail::system_matrix(quadratic_pieces(data, R), hp, hp.mu1);
    const Matrix B = s.M11 - s.M12 * s.M21.transpose() / s.M22;
    EXPECT_NEAR(B(0, 0), 11.0 / 3.0, 1e-15);
    // n_p = m here, so the Gram itself is refused
    try {
        gram_linear_via_B(data, hp, R);
        FAIL();
    } catch (const Error &e) {
        EXPECT_EQ(e.kind(), ErrorKind::InsufficientRank);
    }
}

TEST(LinearViaB, LargeLambdaLimit) {
    SplitMix64 rng(6);
    const auto data = pual::testing::random_problem(rng, 8, 12, 3);
    const auto R = build_laplacian(data.stacked(), {3, 1.0});
    Hyperparams hp = small_hp();
    hp.lambda = 1e8;
    const auto g = gram_linear_via_B(data, hp, R);
    const Matrix X = data.stacked();
    const Matrix expected = X * X.transpose() / hp.lambda;
    EXPECT_LE((g.phi_pu - expected).cwiseAbs().maxCoeff(), 1e-6 * expected.cwiseAbs().maxCoeff());
    EXPECT_LE((g.phi_pu - g.phi_pu.transpose()).cwiseAbs().maxCoeff(), 1e-10 * g.phi_pu.cwiseAbs().maxCoeff());
}

TEST(LinearViaB, Symmetric) {
    SplitMix64 rng(7);
    const auto data = pual::testing::random_problem(rng, 10, 20, 4);
    const auto R = build_laplacian(data.stacked(), {3, 1.0});
    const auto g = gram_linear_via_B(data, small_hp(), R);
    EXPECT_LE((g.phi_pu - g.phi_pu.transpose()).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Omega, SaturatedSlack) {
    SplitMix64 rng(11);
    const auto data = pual::testing::random_problem(rng, 6, 9, 2);
    const auto R = build_laplacian(data.stacked(), {2, 1.0});
    const Hyperparams hp = small_hp();
    AdmmState state = AdmmState::zeros(6);
    state.h.setOnes();
    const Vector omega = update_omega(data, R, hp, state);
    ASSERT_EQ(omega.size(), 15);
    const double M22 = 2.0 * hp.cu * 9 + hp.mu1 * 6;  // 1^T R 1 = 0
    const double m2 = -2.0 * hp.cu * 9;
    for (Eigen::Index i = 6; i < 15; ++i) {
        EXPECT_NEAR(omega(i), -2.0 * hp.cu * (1.0 + m2 / M22), 1e-12);
    }
    // mu1 (1 - h) = 0 and u = 0 leave -mu1 c on the positives
    for (Eigen::Index i = 0; i < 6; ++i) {
        EXPECT_NEAR(omega(i), -hp.mu1 * m2 / M22, 1e-12);
    }
}

TEST(Beta0Kernel, Examples) {
    SplitMix64 rng(12);
    const auto data = pual::testing::random_problem(rng, 7, 10, 2);
    const auto R = build_laplacian(data.stacked(), {2, 1.0});
    const Hyperparams hp = small_hp();
    const auto grams = gram_linear_via_B(data, hp, R);
    AdmmState state = AdmmState::zeros(7);
    state.u_h = Vector::Random(7);
    const double m2 = -2.0 * hp.cu * 10 + state.u_h.sum() + hp.mu1 * 7;
    const double M22 = 2.0 * hp.cu * 10 + 2.0 * R.R.sum() + hp.mu1 * 7;
    EXPECT_NEAR(update_beta0_kernel(grams, R, hp, state, Vector::Zero(17)), m2 / M22, 1e-14);

    const Vector omega = Vector::Random(17);
    const double q1 = m2 / M22 - update_beta0_kernel(grams, R, hp, state, omega);
    const double q2 = m2 / M22 - update_beta0_kernel(grams, R, hp, state, 2.0 * omega);
    EXPECT_NEAR(q2, 2.0 * q1, 1e-12 * std::max(1.0, std::abs(q1)));
}

TEST(Beta0Kernel, MatchesBorderedSolve) {
    SplitMix64 rng(13);
    const auto data = pual::testing::random_problem(rng, 9, 14, 3);
    const auto R = build_laplacian(data.stacked(), {3, 1.0});
    const Hyperparams hp = small_hp();
    AdmmState state = AdmmState::zeros(9);
    state.h = Vector::Random(9).cwiseAbs();
    state.u_h = Vector::Random(9);
    const auto [beta, beta0] = solve_beta(assemble_beta_system(data, R, hp, state));
    const auto grams = gram_linear_via_B(data, hp, R);
    const Vector omega = update_omega(data, R, hp, state);
    EXPECT_NEAR(update_beta0_kernel(grams, R, hp, state, omega), beta0, 1e-8);
    // beta = B^{-1} X^T Omega
    const Matrix P = linear_via_b_projection(data, hp, R);
    EXPECT_LE((P * omega - beta).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(HDualKernel, FeasiblePoint) {
    GramBlocks g = GramBlocks::from_square(Matrix::Zero(4, 4), 2);
    const auto [h, u] = update_h_dual_kernel(g, small_hp(), AdmmState::zeros(2), Vector::Zero(4), 1.0);
    EXPECT_EQ(h, Vector::Zero(2));
    EXPECT_EQ(u, Vector::Zero(2));
}

TEST(HDualKernel, MirrorsLinearUpdate) {
    SplitMix64 rng(14);
    const auto data = pual::testing::random_problem(rng, 8, 11, 2);
    const auto R = build_laplacian(data.stacked(), {3, 1.0});
    const Hyperparams hp = small_hp();
    AdmmState state = AdmmState::zeros(8);
    state.u_h = Vector::Random(8);
    const Vector omega = Vector::Random(19);
    const Matrix P = linear_via_b_projection(data, hp, R);
    const Vector beta = P * omega;
    const auto grams = GramBlocks::from_square(data.stacked() * P, 8);
    const auto [h, u] = update_h_dual_kernel(grams, hp, state, omega, 0.3);
    const Vector h_lin = update_h(data, beta, 0.3, hp, state);
    AdmmState next = state;
    next.h = h_lin;
    EXPECT_LE((h - h_lin).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_LE((u - update_dual(data, beta, 0.3, next, hp.mu1)).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(FitKernel, MatchesLinearAtEqualIterations) {
    SplitMix64 rng(15);
    const auto data = pual::testing::random_problem(rng, 12, 18, 2);
    const Hyperparams hp = small_hp();
    const StopCriteria stop{0.0, 60, false};
    const auto lin = fit_linear(data, hp, stop);
    const auto ker = fit_kernel(data, hp, KernelSpec::linear_via_b(), stop);
    ASSERT_EQ(lin.report.iterations, ker.report.iterations);
    const Matrix probe = pual::testing::random_problem(rng, 20, 1, 2).features_p;
    const auto a = predict_linear(lin.model, probe);
    const auto b = predict_kernel(ker.model, probe);
    EXPECT_LE((a.scores - b.scores).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(FitKernel, ZeroIterations) {
    SplitMix64 rng(16);
    const auto data = pual::testing::random_problem(rng, 10, 10, 2);
    const auto fit = fit_kernel(data, small_hp(), KernelSpec::rbf(1.0), {1e-6, 0, false});
    EXPECT_EQ(fit.report.iterations, 0);
    EXPECT_FALSE(fit.report.converged);
    EXPECT_EQ(fit.model.omega, Vector::Zero(20));
    EXPECT_EQ(fit.model.beta0, 0.0);
    const auto p = predict_kernel(fit.model, data.features_u);
    EXPECT_EQ(p.scores, Vector::Zero(10));
}

TEST(FitKernel, RbfTrainingRowsUseImpliedGram) {
    SplitMix64 rng(18);
    const auto data = pual::testing::random_problem(rng, 10, 25, 2);
    const Hyperparams hp = small_hp();
    const auto fit = fit_kernel(data, hp, KernelSpec::rbf(0.8), {1e-8, 3000, false});
    ASSERT_TRUE(fit.report.converged);

    const Matrix X = fit.model.train_features;
    const auto R = build_laplacian(X, hp.knn);
    const RbfBasis basis(gram_rbf(X, X, 0.8), 10);
    const RbfLocal local(basis, R);
    const RbfImplied implied(basis, local, BWeights::of(hp, BForm::pual), 1.0);
    const Vector expected = (implied.phi() * fit.model.omega).array() + fit.model.beta0;

    Matrix raw(35, 2);
    raw << data.features_p, data.features_u;
    const auto pred = predict_kernel(fit.model, raw);
    EXPECT_LE((pred.scores - expected).cwiseAbs().maxCoeff(), 1e-8 * std::max(1.0, expected.cwiseAbs().maxCoeff()));
}

TEST(FitKernel, ImpliedGramIsSymmetricPsdAndContracts) {
    SplitMix64 rng(19);
    const auto data = pual::testing::random_problem(rng, 10, 20, 2);
    const Matrix X = data.stacked();
    const Hyperparams hp = small_hp();
    const auto R = build_laplacian(X, hp.knn);
    const RbfBasis basis(gram_rbf(X, X, 1.0), 10);
    const RbfLocal local(basis, R);
    const RbfImplied implied(basis, local, BWeights::of(hp, BForm::pual), 1.0);
    const Matrix phi = implied.phi();
    EXPECT_LE((phi - phi.transpose()).cwiseAbs().maxCoeff(), 1e-10);
    const Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (phi + phi.transpose()));
    EXPECT_GE(eig.eigenvalues().minCoeff(), -1e-10);
    EXPECT_LE((implied.problem().phi_p - phi.topRows(10)).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(FitKernel, Precomputed) {
    SplitMix64 rng(20);
    const auto data = pual::testing::random_problem(rng, 10, 20, 2);
    const Hyperparams hp = small_hp();
    const auto R = build_laplacian(fit_standardizer(data).apply(data.stacked()), hp.knn);
    const Matrix gram = gram_linear_via_B(fit_standardizer(data).apply(data), hp, R).phi_pu;
    const auto pre = fit_kernel_precomputed(data, hp, gram, {0.0, 40, false});
    const auto via_b = fit_kernel(data, hp, KernelSpec::linear_via_b(), {0.0, 40, false});
    EXPECT_LE((pre.model.omega - via_b.model.omega).cwiseAbs().maxCoeff(), 1e-10);
    try {
        (void)predict_kernel(pre.model, data.features_p);
        FAIL();
    } catch (const Error &e) {
        EXPECT_EQ(e.kind(), ErrorKind::UnsupportedForPrecomputed);
    }
    EXPECT_THROW(fit_kernel_precomputed(data, hp, Matrix::Identity(5, 5)), Error);
}

TEST(KernelSpec, Validation) {
    EXPECT_THROW(KernelSpec::rbf(0.0).validate(), Error);
    EXPECT_THROW(KernelSpec::rbf(1.0, -1.0).validate(), Error);
    EXPECT_NO_THROW(KernelSpec::rbf(1.0).validate());
}
