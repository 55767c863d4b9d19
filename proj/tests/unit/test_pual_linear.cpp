#include "pual/pual_linear.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>

using namespace pual;
using pual::testing::grid_argmin;

namespace {

/// One labeled positive at 1, one unlabeled at -1, no Laplacian.
struct OneDimensional {
    PUDataset data{Matrix::Constant(1, 1, 1.0), Matrix::Constant(1, 1, -1.0), {}};
    LaplacianMatrix R{Matrix::Zero(2, 2)};
    Hyperparams hp{1.0, 1.0, 1.0, 1.0, {1, 1.0}};
};

PUDataset separable_toy() {
    PUDataset d{Matrix(2, 1), Matrix(2, 1), {}};
    d.features_p << 2.0, 2.5;
    d.features_u << -2.0, -2.5;
    return d;
}

}  // namespace

TEST(BetaSystem, HandExample) {
    const OneDimensional t;
    const auto s = assemble_beta_system(t.data, t.R, t.hp, AdmmState::zeros(1));
    EXPECT_DOUBLE_EQ(s.M11(0, 0), 4.0);
    EXPECT_DOUBLE_EQ(s.M22, 3.0);
    EXPECT_DOUBLE_EQ(s.M12(0), -1.0);
    EXPECT_DOUBLE_EQ(s.M21(0), -1.0);
    // m1 = -2 C_u X_u^T 1 + X_p^T (u + mu1 (1 - h)) = 2 + 1, m2 = -2 + 1
    EXPECT_DOUBLE_EQ(s.m1(0), 3.0);
    EXPECT_DOUBLE_EQ(s.m2, -1.0);

    // [[4, -1], [-1, 3]] x = [3, -1] -> x = (8/11, -1/11)
    const auto [beta, beta0] = solve_beta(s);
    EXPECT_NEAR(beta(0), 8.0 / 11.0, 1e-15);
    EXPECT_NEAR(beta0, -1.0 / 11.0, 1e-15);
}

TEST(BetaSystem, RidgeOnly) {
    SplitMix64 rng(1);
    const auto data = pual::testing::random_problem(rng, 4, 6, 3);
    Hyperparams hp;
    hp.lambda = 2.5;
    hp.cu = 1e-300;  // C_u -> 0
    hp.mu1 = 1e-300;
    const LaplacianMatrix R{Matrix::Zero(10, 10)};
    const auto s = assemble_beta_system(data, R, hp, AdmmState::zeros(4));
    EXPECT_TRUE(s.M11.isApprox(2.5 * Matrix::Identity(3, 3), 1e-12));
}

TEST(BetaSystem, SymmetricBorders) {
    SplitMix64 rng(2);
    const auto data = pual::testing::random_problem(rng, 7, 12, 4);
    const auto R = build_laplacian(data.stacked(), {3, 1.0});
    const auto s = assemble_beta_system(data, R, Hyperparams{}, AdmmState::zeros(7));
    EXPECT_LT((s.M12 - s.M21).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LT((s.M11 - s.M11.transpose()).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(SolveBeta, ZeroRightHandSide) {
    BetaSystem s{Matrix::Identity(2, 2), Vector::Zero(2), Vector::Zero(2), 1.0, Vector::Zero(2), 0.0};
    const auto [beta, beta0] = solve_beta(s);
    EXPECT_EQ(beta, Vector::Zero(2));
    EXPECT_EQ(beta0, 0.0);
}

TEST(SolveBeta, Singular) {
    BetaSystem s{Matrix::Zero(2, 2), Vector::Zero(2), Vector::Zero(2), 0.0, Vector::Ones(2), 1.0};
    try {
        (void)solve_beta(s);
        FAIL();
    } catch (const Error &e) {
        EXPECT_EQ(e.category(), ErrorCategory::numerical);
    }
}

TEST(SoftThreshold, Branches) {
    EXPECT_EQ(soft_threshold(1.0, 2.0), 1.0);
    EXPECT_EQ(soft_threshold(1.0, 0.5), 0.0);
    EXPECT_EQ(soft_threshold(1.0, -0.3), -0.3);
    EXPECT_EQ(soft_threshold(1.0, 1.0), 0.0);
    EXPECT_EQ(soft_threshold(1.0, 0.0), 0.0);
    EXPECT_THROW(soft_threshold(0.0, 1.0), Error);
}

TEST(UpdateH, Examples) {
    PUDataset data{Matrix(2, 1), Matrix::Zero(1, 1), {}};
    data.features_p << -1.0, 1.0;  // with beta = 1, beta0 = 0 the scores are -1 and 1
    Hyperparams hp;
    hp.cp = 1.0;
    hp.mu1 = 1.0;
    const Vector h = update_h(data, Vector::Ones(1), 0.0, hp, AdmmState::zeros(2));
    EXPECT_EQ(h(0), 1.0);
    EXPECT_EQ(h(1), 0.0);
}

TEST(UpdateH, GridOracle) {
    SplitMix64 rng(9);
    for (int trial = 0; trial < 50; ++trial) {
        const Eigen::Index n_p = 6;
        PUDataset data{Matrix(n_p, 2), Matrix::Zero(1, 2), {}};
        for (Eigen::Index i = 0; i < data.features_p.size(); ++i) {
            data.features_p.data()[i] = 3.0 * rng.normal_pair().first;
        }
        Hyperparams hp;
        hp.cp = 0.1 + 3.0 * rng.uniform();
        hp.mu1 = 0.2 + 2.0 * rng.uniform();
        AdmmState state = AdmmState::zeros(n_p);
        for (Eigen::Index i = 0; i < n_p; ++i) {
            state.u_h(i) = rng.normal_pair().first;
        }
        const Vector beta = Vector::Random(2);
        const double beta0 = rng.normal_pair().first;
        const Vector h = update_h(data, beta, beta0, hp, state);
        const Vector f = (data.features_p * beta).array() + beta0;
        for (Eigen::Index i = 0; i < n_p; ++i) {
            // C_p [h]_+ + u (1 - f - h) + mu1/2 (1 - f - h)^2
            const auto sub = [&](double x) {
                const double r = 1.0 - f(i) - x;
                return hp.cp * std::max(x, 0.0) + state.u_h(i) * r + 0.5 * hp.mu1 * r * r;
            };
            const double oracle = grid_argmin(sub, -10.0, 10.0, 1e-3);
            if (std::abs(h(i)) < 10.0) {
                EXPECT_NEAR(h(i), oracle, 1e-3);
                EXPECT_LE(sub(h(i)), sub(oracle) + 1e-12);
            }
        }
    }
}

TEST(UpdateDual, Examples) {
    PUDataset data{Matrix::Zero(1, 1), Matrix::Zero(1, 1), {}};
    AdmmState state = AdmmState::zeros(1);
    // beta = 0, beta0 = 0.5, h = 0 -> residual 0.5
    Vector u = update_dual(data, Vector::Zero(1), 0.5, state, 2.0);
    EXPECT_DOUBLE_EQ(u(0), 1.0);
    state.u_h = u;
    u = update_dual(data, Vector::Zero(1), 0.5, state, 2.0);
    EXPECT_DOUBLE_EQ(u(0), 2.0);
    state.h = Vector::Constant(1, 0.5);
    EXPECT_EQ(update_dual(data, Vector::Zero(1), 0.5, state, 2.0), state.u_h);
}

TEST(Objective, Examples) {
    SplitMix64 rng(4);
    const auto data = pual::testing::random_problem(rng, 5, 8, 2);
    const auto R = build_laplacian(data.stacked(), {3, 1.0});
    Hyperparams hp;
    hp.cp = 0.7;
    hp.cu = 0.3;
    EXPECT_NEAR(objective_value(data, R, hp, Vector::Zero(2), 0.0), 0.7 * 5 + 0.3 * 8, 1e-12);
    EXPECT_NEAR(objective_value(data, R, hp, Vector::Zero(2), 1.0), 0.3 * 4 * 8, 1e-12);

    Hyperparams ridge_only = hp;
    ridge_only.cp = 1e-300;
    ridge_only.cu = 1e-300;
    const LaplacianMatrix zero{Matrix::Zero(13, 13)};
    const Vector beta = Vector::Random(2);
    EXPECT_NEAR(objective_value(data, zero, ridge_only, 2.0 * beta, 0.0),
                4.0 * objective_value(data, zero, ridge_only, beta, 0.0), 1e-12);
}

TEST(BetaStep, Stationarity) {
    SplitMix64 rng(17);
    for (int trial = 0; trial < 20; ++trial) {
        const auto m = pual::testing::uniform_int(rng, 1, 5);
        const auto n_p = pual::testing::uniform_int(rng, 3, 40);
        const auto n_u = pual::testing::uniform_int(rng, 3, 40);
        const auto data = pual::testing::random_problem(rng, n_p, n_u, m);
        const auto R = build_laplacian(data.stacked(), {2, 1.0});
        Hyperparams hp;
        hp.lambda = 0.1 + rng.uniform();
        hp.cu = 0.05 + rng.uniform();
        hp.mu1 = 0.5 + rng.uniform();
        AdmmState state = AdmmState::zeros(n_p);
        for (Eigen::Index i = 0; i < n_p; ++i) {
            state.h(i) = std::max(0.0, rng.normal_pair().first);
            state.u_h(i) = rng.normal_pair().first;
        }
        const auto [beta, beta0] = solve_beta(assemble_beta_system(data, R, hp, state));
        Vector x(m + 1);
        x << beta, beta0;
        const auto f = [&](const Vector &v) { return beta_step_objective(data, R, hp, state, v.head(m), v(m)); };
        const Vector g = pual::testing::numeric_gradient(f, x, 1e-5);
        EXPECT_LE(g.cwiseAbs().maxCoeff() / std::max(1.0, std::abs(f(x))), 1e-6);
    }
}

TEST(Admm, SeparableToy) {
    Hyperparams hp;
    hp.knn = {1, 1.0};
    const auto fit = fit_linear(separable_toy(), hp);
    Matrix probe(2, 1);
    probe << 3.0, -3.0;
    const auto pred = predict_linear(fit.model, probe);
    EXPECT_EQ(pred.labels, (std::vector<int>{1, -1}));
    EXPECT_TRUE(fit.report.converged);
}

TEST(Admm, InfiniteToleranceStopsAfterOneIteration) {
    Hyperparams hp;
    hp.knn = {1, 1.0};
    const auto fit = fit_linear(separable_toy(), hp, {std::numeric_limits<double>::infinity(), 2000, true});
    EXPECT_EQ(fit.report.iterations, 1);
    EXPECT_TRUE(fit.report.converged);
    EXPECT_EQ(fit.report.objective_trace.size(), 1u);
}

TEST(Admm, ZeroIterations) {
    Hyperparams hp;
    hp.knn = {1, 1.0};
    const auto fit = fit_linear(separable_toy(), hp, {1e-6, 0, true});
    EXPECT_EQ(fit.report.iterations, 0);
    EXPECT_FALSE(fit.report.converged);
    EXPECT_EQ(fit.model.beta, Vector::Zero(1));
    EXPECT_EQ(fit.model.beta0, 0.0);
}

TEST(Admm, Deterministic) {
    SplitMix64 rng(8);
    const auto data = pual::testing::random_problem(rng, 15, 40, 3);
    const auto a = fit_linear(data, Hyperparams{});
    const auto b = fit_linear(data, Hyperparams{});
    EXPECT_EQ(a.model.beta, b.model.beta);
    EXPECT_EQ(a.model.beta0, b.model.beta0);
    EXPECT_EQ(a.report.iterations, b.report.iterations);
}

TEST(Admm, ConvergesAndDecreasesObjective) {
    SplitMix64 rng(10);
    const auto data = pual::testing::random_problem(rng, 20, 60, 2);
    Hyperparams hp;
    hp.cu = 0.05;
    const auto fit = fit_linear(data, hp, {1e-8, 5000, true}, {false});
    ASSERT_TRUE(fit.report.converged);
    EXPECT_LE(fit.report.final_primal_residual, 1e-8);
    const auto R = build_laplacian(data.stacked(), hp.knn);
    EXPECT_LE(objective_value(data, R, hp, fit.model.beta, fit.model.beta0),
              objective_value(data, R, hp, Vector::Zero(2), 0.0));
    EXPECT_NEAR(fit.report.objective_trace.back(), objective_value(data, R, hp, fit.model.beta, fit.model.beta0),
                1e-9);
}

TEST(Predict, Examples) {
    const LinearModel model{Vector::Ones(1), 0.0, Standardizer::identity(1)};
    Matrix X(2, 1);
    X << 2.0, 0.0;
    const auto p = predict_linear(model, X);
    EXPECT_EQ(p.scores(0), 2.0);
    EXPECT_EQ(p.labels, (std::vector<int>{1, 1}));
    const LinearModel negative{Vector::Zero(1), -1.0, Standardizer::identity(1)};
    EXPECT_EQ(predict_linear(negative, X).labels, (std::vector<int>{-1, -1}));
    EXPECT_THROW(predict_linear(model, Matrix::Zero(1, 2)), Error);
}

TEST(Hyperparams, Validation) {
    Hyperparams hp;
    hp.cu = -1.0;
    EXPECT_THROW(hp.validate(), Error);
    hp = Hyperparams{};
    hp.knn.sigma = 0.0;
    try {
        hp.validate();
        FAIL();
    } catch (const Error &e) {
        EXPECT_EQ(e.kind(), ErrorKind::NonPositiveSigma);
    }
}
