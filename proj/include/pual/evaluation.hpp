#ifndef PUAL_EVALUATION_HPP
#define PUAL_EVALUATION_HPP

#include "pual/common.hpp"
#include "pual/dataset.hpp"
#include "pual/error.hpp"
#include "pual/gllc.hpp"
#include "pual/hyperparams.hpp"
#include "pual/pual_kernel.hpp"
#include "pual/pual_linear.hpp"
#include "pual/random.hpp"
#include "pual/similarity.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

namespace pual {

// ---------------------------------------------------------------------------
// Metrics

struct ConfusionCounts {
    std::int64_t tp{0};
    std::int64_t fp{0};
    std::int64_t fn{0};
    std::int64_t tn{0};

    [[nodiscard]] std::int64_t total() const noexcept { return tp + fp + fn + tn; }
};

inline ConfusionCounts confusion(std::span<const int> predicted, std::span<const int> truth) {
    if (predicted.size() != truth.size()) {
        throw Error(ErrorKind::DimensionMismatch, "prediction and truth lengths differ (" +
                                                      std::to_string(predicted.size()) + " vs " +
                                                      std::to_string(truth.size()) + ")");
    }
    ConfusionCounts c;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        const bool p = predicted[i] > 0;
        const bool t = truth[i] > 0;
        if (p && t) {
            ++c.tp;
        } else if (p) {
            ++c.fp;
        } else if (t) {
            ++c.fn;
        } else {
            ++c.tn;
        }
    }
    return c;
}

/// 2tp / (2tp + fp + fn), or 0 when nothing is positive in either list.
inline double f1_score(const ConfusionCounts &c) noexcept {
    const std::int64_t denom = 2 * c.tp + c.fp + c.fn;
    return denom == 0 ? 0.0 : 2.0 * static_cast<double>(c.tp) / static_cast<double>(denom);
}

enum class PufScenario { single_training_set, case_control };

inline std::string_view to_string(PufScenario s) noexcept {
    return s == PufScenario::single_training_set ? "single-training-set" : "case-control";
}

inline PufScenario parse_scenario(std::string_view text) {
    if (text == "single-training-set" || text == "single") {
        return PufScenario::single_training_set;
    }
    if (text == "case-control") {
        return PufScenario::case_control;
    }
    throw Error(ErrorKind::InvalidArgument, "unknown scenario '" + std::string(text) + "'");
}

/// recall^2 / p_hat where recall is the share of labeled positives predicted +1
/// and p_hat the share of `pool` predicted +1. Returns 0 when p_hat is 0.
inline double puf_from_pool(std::span<const int> labeled, std::span<const int> pool) {
    if (labeled.empty()) {
        throw Error(ErrorKind::EmptyLabeledSet, "PUF-score needs at least one labeled positive");
    }
    if (pool.empty()) {
        throw Error(ErrorKind::EmptyPool, "PUF-score needs a non-empty denominator pool");
    }
    const auto positives = [](std::span<const int> v) {
        return static_cast<double>(std::count_if(v.begin(), v.end(), [](int l) { return l > 0; }));
    };
    const double recall = positives(labeled) / static_cast<double>(labeled.size());
    const double p_hat = positives(pool) / static_cast<double>(pool.size());
    return p_hat == 0.0 ? 0.0 : recall * recall / p_hat;
}

/// The pool is labeled + unlabeled predictions for the single-training-set
/// scenario and the unlabeled predictions alone for case-control.
inline double puf_score(std::span<const int> labeled, std::span<const int> unlabeled, PufScenario scenario) {
    if (scenario == PufScenario::case_control) {
        return puf_from_pool(labeled, unlabeled);
    }
    std::vector<int> pool(labeled.begin(), labeled.end());
    pool.insert(pool.end(), unlabeled.begin(), unlabeled.end());
    return puf_from_pool(labeled, pool);
}

// ---------------------------------------------------------------------------
// Folds

/// Fold index per labeled row and per unlabeled row.
struct FoldAssignment {
    int folds{0};
    std::vector<int> labeled;
    std::vector<int> unlabeled;
};

/// Each stratum is shuffled and dealt round-robin, so fold sizes within a
/// stratum differ by at most one.
inline FoldAssignment stratified_folds(Eigen::Index n_p, Eigen::Index n_u, int folds, std::uint64_t seed) {
    if (folds < 2) {
        throw Error(ErrorKind::InvalidArgument, "need at least 2 folds");
    }
    if (n_p < folds) {
        throw Error(ErrorKind::FoldWithoutLabeledPositive, std::to_string(folds) + " folds but only " +
                                                               std::to_string(n_p) + " labeled positives");
    }
    const auto deal = [folds](Eigen::Index count, std::uint64_t stream) {
        std::vector<std::size_t> order(static_cast<std::size_t>(count));
        for (std::size_t i = 0; i < order.size(); ++i) {
            order[i] = i;
        }
        SplitMix64 rng(stream);
        fisher_yates(std::span(order), rng);
        std::vector<int> fold(order.size());
        for (std::size_t i = 0; i < order.size(); ++i) {
            fold[order[i]] = static_cast<int>(i % static_cast<std::size_t>(folds));
        }
        return fold;
    };
    return FoldAssignment{folds, deal(n_p, SplitMix64::derive(seed, 1)), deal(n_u, SplitMix64::derive(seed, 2))};
}

// ---------------------------------------------------------------------------
// Candidates and models

enum class ModelKind { pual_linear, pual_kernel, gllc_linear, gllc_kernel };

inline std::string_view to_string(ModelKind kind) noexcept {
    switch (kind) {
        case ModelKind::pual_linear: return "pual-linear";
        case ModelKind::pual_kernel: return "pual-kernel";
        case ModelKind::gllc_linear: return "gllc-linear";
        case ModelKind::gllc_kernel: return "gllc-kernel";
    }
    return "unknown";
}

inline ModelKind parse_model_kind(std::string_view text) {
    for (const auto kind : {ModelKind::pual_linear, ModelKind::pual_kernel, ModelKind::gllc_linear,
                            ModelKind::gllc_kernel}) {
        if (text == to_string(kind)) {
            return kind;
        }
    }
    throw Error(ErrorKind::InvalidArgument, "unknown model kind '" + std::string(text) + "'");
}

inline bool is_kernel(ModelKind kind) noexcept {
    return kind == ModelKind::pual_kernel || kind == ModelKind::gllc_kernel;
}

inline bool is_gllc(ModelKind kind) noexcept {
    return kind == ModelKind::gllc_linear || kind == ModelKind::gllc_kernel;
}

/// One point of the (lambda, sigma, C_u) search space. For kernel models
/// lambda is the rbf width.
struct Candidate {
    double lambda{1.0};
    double sigma{1.0};
    double cu{0.1};

    auto operator<=>(const Candidate &) const = default;
};

/// Settings shared by every candidate of a tuning run.
struct TuneSettings {
    ModelKind kind{ModelKind::pual_linear};
    PufScenario scenario{PufScenario::single_training_set};
    int folds{4};
    std::uint64_t seed{0};
    double cp{1.0};
    double mu1{1.0};
    int k{5};
    double ridge{1.0};  // rbf kernels only
    StopCriteria stop{1e-6, 2000, false};
    TrainOptions options{};
};

inline Hyperparams hyperparams_for(const Candidate &c, const TuneSettings &s) {
    Hyperparams hp;
    hp.cp = s.cp;
    hp.cu = c.cu;
    hp.mu1 = s.mu1;
    hp.knn = KnnParams{s.k, c.sigma};
    hp.lambda = is_kernel(s.kind) ? 1.0 : c.lambda;
    return hp;
}

inline KernelSpec kernel_for(const Candidate &c, const TuneSettings &s) { return KernelSpec::rbf(c.lambda, s.ridge); }

// ---------------------------------------------------------------------------
// Cross-validation

/// Scores candidates by k-fold PUF on one training set. Everything that does
/// not depend on the full candidate is cached: the per-fold standardization,
/// mutual neighbours, Laplacians per sigma, and for kernels the Gram roots per
/// width. Fits that throw or produce non-finite parameters score -inf.
class CvEvaluator {
  public:
    CvEvaluator(const PUDataset &train, TuneSettings settings)
        : settings_(std::move(settings)),
          assignment_(stratified_folds(train.n_p(), train.n_u(), settings_.folds, settings_.seed)) {
        train.validate();
        for (int f = 0; f < settings_.folds; ++f) {
            folds_.push_back(make_fold(train, f));
        }
    }

    [[nodiscard]] const FoldAssignment &assignment() const noexcept { return assignment_; }
    [[nodiscard]] const TuneSettings &settings() const noexcept { return settings_; }
    [[nodiscard]] std::size_t evaluations() const noexcept { return evaluations_; }

    /// Mean held-out PUF over the folds.
    double operator()(const Candidate &c) {
        ++evaluations_;
        double total = 0.0;
        for (auto &fold : folds_) {
            const double score = score_fold(fold, c);
            if (!std::isfinite(score)) {
                return -std::numeric_limits<double>::infinity();
            }
            total += score;
        }
        return total / static_cast<double>(folds_.size());
    }

  private:
    struct Fold {
        PUDataset train;  // standardized
        Matrix held_p;    // standardized held-out labeled rows
        Matrix held_u;
        std::optional<MutualNeighbors> neighbors;
        std::map<double, std::shared_ptr<LaplacianMatrix>> laplacians;
        std::map<double, std::shared_ptr<LinearProblem>> problems;
        // kernel caches, keyed by the last width / (width, sigma) seen
        std::optional<double> width;
        std::unique_ptr<RbfBasis> basis;
        Matrix cross_p;  // K(held_p, train)
        Matrix cross_u;
        std::optional<double> local_sigma;
        std::unique_ptr<RbfLocal> local;
    };

    Fold make_fold(const PUDataset &train, int f) const {
        const auto pick = [f](const Matrix &X, const std::vector<int> &which, bool inside) {
            std::vector<std::size_t> rows;
            for (std::size_t i = 0; i < which.size(); ++i) {
                if ((which[i] == f) == inside) {
                    rows.push_back(i);
                }
            }
            return detail::rows_of(X, rows);
        };
        PUDataset fit_part{pick(train.features_p, assignment_.labeled, false),
                           pick(train.features_u, assignment_.unlabeled, false), train.feature_names};
        const Standardizer s =
            settings_.options.standardize ? fit_standardizer(fit_part) : Standardizer::identity(train.m());
        Fold fold;
        fold.train = s.apply(fit_part);
        fold.held_p = s.apply(pick(train.features_p, assignment_.labeled, true));
        fold.held_u = s.apply(pick(train.features_u, assignment_.unlabeled, true));
        return fold;
    }

    const LaplacianMatrix &laplacian_for(Fold &fold, double sigma) const {
        auto it = fold.laplacians.find(sigma);
        if (it != fold.laplacians.end()) {
            return *it->second;
        }
        if (!fold.neighbors) {
            fold.neighbors = mutual_knn(fold.train.stacked(), settings_.k);
        }
        auto lap = std::make_shared<LaplacianMatrix>(laplacian(similarity_weights(*fold.neighbors, sigma)));
        return *fold.laplacians.emplace(sigma, std::move(lap)).first->second;
    }

    const LinearProblem &problem_for(Fold &fold, double sigma) const {
        auto it = fold.problems.find(sigma);
        if (it != fold.problems.end()) {
            return *it->second;
        }
        auto problem = std::make_shared<LinearProblem>(fold.train, laplacian_for(fold, sigma));
        return *fold.problems.emplace(sigma, std::move(problem)).first->second;
    }

    void prepare_kernel(Fold &fold, const Candidate &c) const {
        if (!fold.width || *fold.width != c.lambda) {
            fold.basis.reset();
            fold.local.reset();
            fold.local_sigma.reset();
            fold.width.reset();
            const Matrix X = fold.train.stacked();
            fold.basis = std::make_unique<RbfBasis>(gram_rbf(X, X, c.lambda), fold.train.n_p());
            fold.cross_p = gram_rbf(fold.held_p, X, c.lambda);
            fold.cross_u = gram_rbf(fold.held_u, X, c.lambda);
            fold.width = c.lambda;
        }
        if (!fold.local_sigma || *fold.local_sigma != c.sigma) {
            fold.local = std::make_unique<RbfLocal>(*fold.basis, laplacian_for(fold, c.sigma));
            fold.local_sigma = c.sigma;
        }
    }

    double score_fold(Fold &fold, const Candidate &c) const {
        try {
            const Hyperparams hp = hyperparams_for(c, settings_);
            hp.validate();
            Vector sp;
            Vector su;
            if (!is_kernel(settings_.kind)) {
                const LinearProblem &problem = problem_for(fold, c.sigma);
                LinearModel model;
                if (settings_.kind == ModelKind::pual_linear) {
                    model = admm_linear(problem, hp, settings_.stop).model;
                } else {
                    model = gllc_linear_solve(problem, hp);
                }
                sp = (fold.held_p * model.beta).array() + model.beta0;
                su = (fold.held_u * model.beta).array() + model.beta0;
            } else {
                kernel_for(c, settings_).validate();
                prepare_kernel(fold, c);
                const LaplacianMatrix &lap = laplacian_for(fold, c.sigma);
                const bool pual = settings_.kind == ModelKind::pual_kernel;
                const RbfImplied implied(*fold.basis, *fold.local, BWeights::of(hp, pual ? BForm::pual : BForm::gllc),
                                         settings_.ridge, pual);
                Vector omega;
                double beta0 = 0.0;
                if (pual) {
                    auto fit = admm_kernel(implied.problem(), hp, settings_.stop);
                    omega = std::move(fit.model.omega);
                    beta0 = fit.model.beta0;
                } else {
                    std::tie(omega, beta0) = gllc_kernel_solve(implied.problem(), hp);
                }
                const Vector coef = implied.coefficients(omega, lap);
                sp = (fold.cross_p * coef).array() + beta0;
                su = (fold.cross_u * coef).array() + beta0;
            }
            if (!sp.allFinite() || !su.allFinite()) {
                return -std::numeric_limits<double>::infinity();
            }
            const auto lp = label_scores(sp).labels;
            const auto lu = label_scores(su).labels;
            return puf_score(lp, lu, settings_.scenario);
        } catch (const Error &e) {
            if (e.kind() == ErrorKind::EmptyPool || e.kind() == ErrorKind::EmptyLabeledSet) {
                throw;
            }
            return -std::numeric_limits<double>::infinity();
        }
    }

    TuneSettings settings_;
    FoldAssignment assignment_;
    std::vector<Fold> folds_;
    std::size_t evaluations_{0};
};

/// Mean k-fold PUF of a single candidate.
inline double kfold_cv(const PUDataset &train, const Candidate &candidate, const TuneSettings &settings) {
    CvEvaluator evaluator(train, settings);
    return evaluator(candidate);
}

// ---------------------------------------------------------------------------
// Search

struct GridSpec {
    std::string name;
    std::vector<double> lambda;
    std::vector<double> sigma;
    std::vector<double> cu;
    bool greedy{false};

    [[nodiscard]] std::size_t size() const noexcept { return lambda.size() * sigma.size() * cu.size(); }

    void validate() const {
        for (const auto *grid : {&lambda, &sigma, &cu}) {
            if (grid->empty()) {
                throw Error(ErrorKind::InvalidArgument, "grid '" + name + "' has an empty axis");
            }
            for (const double v : *grid) {
                if (!(v > 0.0) || !std::isfinite(v)) {
                    throw Error(ErrorKind::InvalidArgument, "grid values must be positive finite reals");
                }
            }
        }
    }

    /// {1,...,5} x {0.1, 1, 10, 100} products for lambda and sigma; C_u in 0.01..0.50.
    static GridSpec synthetic() {
        GridSpec g{"synthetic", {}, {}, {}, false};
        for (const double scale : {0.1, 1.0, 10.0, 100.0}) {
            for (int a = 1; a <= 5; ++a) {
                g.lambda.push_back(a * scale);
            }
        }
        std::sort(g.lambda.begin(), g.lambda.end());
        g.sigma = g.lambda;
        for (int i = 1; i <= 50; ++i) {
            g.cu.push_back(i / 100.0);
        }
        return g;
    }

    /// Decades 1e-4..1e4 for lambda and sigma, five C_u values, then greedy steps.
    static GridSpec real() {
        GridSpec g{"real", {}, {}, {0.01, 0.05, 0.1, 0.3, 0.5}, true};
        for (int e = -4; e <= 4; ++e) {
            g.lambda.push_back(std::pow(10.0, e));
        }
        g.sigma = g.lambda;
        return g;
    }

    /// Decades 1e-3..1e4 for lambda and sigma; C_u in 0.05..0.50.
    static GridSpec reduced() {
        GridSpec g{"reduced", {}, {}, {}, false};
        for (int e = -3; e <= 4; ++e) {
            g.lambda.push_back(std::pow(10.0, e));
        }
        g.sigma = g.lambda;
        for (int i = 1; i <= 10; ++i) {
            g.cu.push_back(i * 5 / 100.0);
        }
        return g;
    }

    static GridSpec preset(std::string_view name) {
        if (name == "synthetic") {
            return synthetic();
        }
        if (name == "real") {
            return real();
        }
        if (name == "reduced") {
            return reduced();
        }
        throw Error(ErrorKind::InvalidArgument, "unknown grid preset '" + std::string(name) + "'");
    }
};

struct ScoredCandidate {
    Candidate candidate;
    double score{0.0};
};

struct TuneResult {
    Candidate best;
    double best_score{-std::numeric_limits<double>::infinity()};
    std::vector<ScoredCandidate> grid_scores;
    std::vector<ScoredCandidate> greedy_trace;
    int folds{0};
    std::uint64_t seed{0};
};

using CandidateScorer = std::function<double(const Candidate &)>;

namespace detail {

/// Higher score wins; equal scores go to the lexicographically smaller candidate.
inline bool better(const ScoredCandidate &a, const ScoredCandidate &b) {
    if (a.score != b.score) {
        return a.score > b.score;
    }
    return a.candidate < b.candidate;
}

}  // namespace detail

/// Exhaustive search over lambda x sigma x C_u.
inline TuneResult grid_search(const GridSpec &grid, const CandidateScorer &score) {
    grid.validate();
    TuneResult result;
    result.grid_scores.reserve(grid.size());
    std::optional<ScoredCandidate> best;
    for (const double lambda : grid.lambda) {
        for (const double sigma : grid.sigma) {
            for (const double cu : grid.cu) {
                const ScoredCandidate sc{Candidate{lambda, sigma, cu}, score(Candidate{lambda, sigma, cu})};
                result.grid_scores.push_back(sc);
                if (!best || detail::better(sc, *best)) {
                    best = sc;
                }
            }
        }
    }
    result.best = best->candidate;
    result.best_score = best->score;
    return result;
}

/// From `start`, repeatedly score the six neighbours obtained by scaling one of
/// lambda, sigma, C_u by 1.1 or 0.9 and move to the best one while it strictly
/// improves. The trace starts with `start`.
inline std::vector<ScoredCandidate> greedy_refine(const ScoredCandidate &start, const CandidateScorer &score,
                                                  int max_steps = 1000) {
    std::vector<ScoredCandidate> trace{start};
    std::map<Candidate, double> seen{{start.candidate, start.score}};
    const auto cached = [&](const Candidate &c) {
        auto it = seen.find(c);
        if (it == seen.end()) {
            it = seen.emplace(c, score(c)).first;
        }
        return it->second;
    };
    for (int step = 0; step < max_steps; ++step) {
        const Candidate &here = trace.back().candidate;
        std::optional<ScoredCandidate> best;
        for (const double factor : {1.1, 0.9}) {
            for (int axis = 0; axis < 3; ++axis) {
                Candidate next = here;
                double &v = axis == 0 ? next.lambda : (axis == 1 ? next.sigma : next.cu);
                v *= factor;
                const ScoredCandidate sc{next, cached(next)};
                if (!best || detail::better(sc, *best)) {
                    best = sc;
                }
            }
        }
        if (!(best->score > trace.back().score)) {
            break;
        }
        trace.push_back(*best);
    }
    return trace;
}

/// Grid phase, then the greedy phase when the grid asks for it.
inline TuneResult tune(const PUDataset &train, const GridSpec &grid, const TuneSettings &settings) {
    CvEvaluator evaluator(train, settings);
    const CandidateScorer score = [&evaluator](const Candidate &c) { return evaluator(c); };
    TuneResult result = grid_search(grid, score);
    if (grid.greedy && std::isfinite(result.best_score)) {
        result.greedy_trace = greedy_refine(ScoredCandidate{result.best, result.best_score}, score);
        result.best = result.greedy_trace.back().candidate;
        result.best_score = result.greedy_trace.back().score;
    }
    result.folds = settings.folds;
    result.seed = settings.seed;
    return result;
}

}  // namespace pual

#endif  // PUAL_EVALUATION_HPP
