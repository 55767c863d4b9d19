// Command-line front end: synth, split, train, predict, eval, tune, reproduce-table1.
// Exit codes: 0 success, 1 usage/validation, 2 data error, 3 numerical failure.

#include "json_config.hpp"

#include "pual/dataset.hpp"
#include "pual/error.hpp"
#include "pual/evaluation.hpp"
#include "pual/experiment.hpp"
#include "pual/gllc.hpp"
#include "pual/model_io.hpp"
#include "pual/pual_kernel.hpp"
#include "pual/pual_linear.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <memory>
#include <optional>
#include <string>

namespace {

using namespace pual;

constexpr int exit_usage = 1;

/// Usage errors found after parsing, e.g. flag combinations CLI11 cannot express.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

Fraction parse_fraction_flag(const std::string &flag, const std::string &text) {
    try {
        return Fraction::parse(text);
    } catch (const Error &) {
        throw UsageError(flag + ": '" + text + "' is not a rational such as 1/4 or 0.25");
    }
}

/// Runs a file reader and prefixes any data error with the file name.
template <typename Fn>
auto from_file(const std::string &path, Fn &&read) {
    try {
        return read(path);
    } catch (const Error &e) {
        if (e.kind() == ErrorKind::Io) {
            throw;
        }
        throw Error(e.kind(), "'" + path + "': " + e.detail());
    }
}

std::ofstream open_output(const std::string &path) {
    std::ofstream out(path);
    if (!out) {
        throw Error(ErrorKind::Io, "cannot open '" + path + "' for writing");
    }
    return out;
}

// ---------------------------------------------------------------------------

struct SynthArgs {
    double mean_p2{50.0};
    std::uint64_t seed{0};
    std::string out;
};

void run_synth(const SynthArgs &a) {
    save_eval_csv(a.out, synth_generate(SynthSpec{a.mean_p2, a.seed}));
}

struct SplitArgs {
    std::string mode{"single-training-set"};
    std::optional<std::string> gamma_prime;
    std::optional<std::string> labeled_fraction;
    std::string test_fraction{"3/10"};
    std::uint64_t seed{0};
    std::string in;
    std::string train_out;
    std::string test_out;
};

void run_split(const SplitArgs &a) {
    SplitSpec spec;
    spec.seed = a.seed;
    spec.test_fraction = parse_fraction_flag("--test-fraction", a.test_fraction);
    if (a.mode == "single-training-set") {
        if (a.gamma_prime) {
            throw UsageError("--gamma-prime: only valid with --mode case-control");
        }
        spec.mode = SplitMode::single_training_set;
        spec.labeled_fraction = parse_fraction_flag("--labeled-fraction", a.labeled_fraction.value_or("1/4"));
    } else {
        if (a.labeled_fraction) {
            throw UsageError("--labeled-fraction: only valid with --mode single-training-set");
        }
        if (!a.gamma_prime) {
            throw UsageError("--gamma-prime: required with --mode case-control");
        }
        spec.mode = SplitMode::case_control;
        spec.gamma_prime = parse_fraction_flag("--gamma-prime", *a.gamma_prime);
    }
    try {
        spec.validate();
    } catch (const Error &e) {
        throw UsageError(std::string("split fractions: ") + e.what());
    }
    const SplitResult result = split(from_file(a.in, load_eval_csv), spec);
    save_pu_csv(a.train_out, result.train);
    save_eval_csv(a.test_out, result.test);
    std::cout << "train: n_p=" << result.train.n_p() << " n_u=" << result.train.n_u()
              << " test: n=" << result.test.n() << '\n';
}

struct FitArgs {
    double cp{1.0};
    double cu{0.1};
    double lambda{1.0};
    double sigma{1.0};
    double mu1{1.0};
    int knn{5};
    double ridge{1.0};
    double tol{1e-6};
    int max_iter{2000};
    bool no_standardize{false};
};

void add_fit_flags(CLI::App *cmd, FitArgs &f, bool with_grid_params) {
    cmd->add_option("--cp", f.cp, "weight of the labeled-positive loss")->check(CLI::PositiveNumber);
    cmd->add_option("--mu1", f.mu1, "ADMM step size")->check(CLI::PositiveNumber);
    cmd->add_option("--knn", f.knn, "neighbour count K of the similarity graph")->check(CLI::PositiveNumber);
    cmd->add_option("--ridge", f.ridge, "ridge inside B for rbf kernels")->check(CLI::PositiveNumber);
    cmd->add_option("--tol", f.tol, "ADMM residual tolerance")->check(CLI::PositiveNumber);
    cmd->add_option("--max-iter", f.max_iter, "ADMM iteration budget")->check(CLI::NonNegativeNumber);
    cmd->add_flag("--no-standardize", f.no_standardize, "keep raw feature scales");
    if (with_grid_params) {
        cmd->add_option("--lambda", f.lambda, "ridge weight, or the rbf width for rbf kernels")
            ->check(CLI::PositiveNumber);
        cmd->add_option("--sigma", f.sigma, "width of the similarity weights")->check(CLI::PositiveNumber);
        cmd->add_option("--cu", f.cu, "weight of the unlabeled loss")->check(CLI::PositiveNumber);
    }
}

struct TrainArgs {
    std::string model;
    std::string data;
    std::string kernel{"auto"};
    std::optional<std::string> gram;
    std::string out;
    FitArgs fit;
};

Hyperparams hyperparams_of(const FitArgs &f, bool rbf) {
    Hyperparams hp;
    hp.cp = f.cp;
    hp.cu = f.cu;
    hp.lambda = rbf ? 1.0 : f.lambda;
    hp.mu1 = f.mu1;
    hp.knn = KnnParams{f.knn, f.sigma};
    return hp;
}

void run_train(const TrainArgs &a) {
    const ModelKind kind = parse_model_kind(a.model);
    std::string kernel = a.kernel;
    if (kernel == "auto") {
        kernel = is_kernel(kind) ? (a.gram ? "precomputed" : "rbf") : "none";
    }
    if (is_kernel(kind) == (kernel == "none")) {
        throw UsageError("--kernel: '" + kernel + "' does not fit --model " + a.model);
    }
    if (a.gram && (kind != ModelKind::pual_kernel || kernel != "precomputed")) {
        throw UsageError("--gram: only valid with --model pual-kernel and --kernel precomputed");
    }
    if (kernel == "precomputed" && !a.gram) {
        throw UsageError("--kernel precomputed needs --gram");
    }
    const PUDataset data = from_file(a.data, load_pu_csv);
    const TrainOptions options{!a.fit.no_standardize};
    const StopCriteria stop{a.fit.tol, a.fit.max_iter, false};

    ModelEnvelope env;
    env.kind = kind;
    env.hyperparams = hyperparams_of(a.fit, kernel == "rbf");
    KernelSpec spec = KernelSpec::rbf(a.fit.lambda, a.fit.ridge);
    if (kernel == "linear-via-b") {
        spec = KernelSpec::linear_via_b();
    } else if (kernel == "precomputed") {
        spec = KernelSpec::precomputed();
    } else if (kernel != "rbf" && kernel != "none") {
        throw UsageError("--kernel: unknown kernel '" + kernel + "'");
    }
    switch (kind) {
        case ModelKind::pual_linear: {
            auto fit = fit_linear(data, env.hyperparams, stop, options);
            env.params = std::move(fit.model);
            env.report = std::move(fit.report);
            break;
        }
        case ModelKind::pual_kernel: {
            KernelFit fit;
            if (a.gram) {
                const Matrix gram = from_file(*a.gram, load_matrix_csv);
                if (gram.rows() != data.n() || gram.cols() != data.n()) {
                    throw Error(ErrorKind::DimensionMismatch, "--gram '" + *a.gram + "' is " +
                                                                  std::to_string(gram.rows()) + " x " +
                                                                  std::to_string(gram.cols()) + ", training set has " +
                                                                  std::to_string(data.n()) + " rows");
                }
                fit = fit_kernel_precomputed(data, env.hyperparams, gram, stop, options);
            } else {
                fit = fit_kernel(data, env.hyperparams, spec, stop, options);
            }
            env.params = std::move(fit.model);
            env.report = std::move(fit.report);
            break;
        }
        case ModelKind::gllc_linear: env.params = fit_gllc_linear(data, env.hyperparams, options).params; break;
        case ModelKind::gllc_kernel: env.params = fit_gllc_kernel(data, env.hyperparams, spec, options).params; break;
    }
    save_model(a.out, env);
    std::cout << "model " << a.model << " written to " << a.out;
    if (const auto *k = std::get_if<KernelModel>(&env.params)) {
        std::cout << " (retains " << k->train_features.rows() << " x " << k->train_features.cols()
                  << " training features)";
    }
    if (kind == ModelKind::pual_linear || kind == ModelKind::pual_kernel) {
        std::cout << " iterations=" << env.report.iterations << " converged=" << (env.report.converged ? 1 : 0)
                  << " primal_residual=" << env.report.final_primal_residual;
    }
    std::cout << '\n';
}

struct PredictArgs {
    std::string model;
    std::string data;
    std::string out;
};

void run_predict(const PredictArgs &a) {
    const ModelEnvelope env = load_model(a.model);
    const Prediction pred = env.predict(from_file(a.data, load_feature_csv));
    auto out = open_output(a.out);
    out << "score,label\n";
    for (Eigen::Index i = 0; i < pred.scores.size(); ++i) {
        out << detail::format_real(pred.scores(i)) << ',' << pred.labels[static_cast<std::size_t>(i)] << '\n';
    }
}

struct EvalArgs {
    std::string preds;
    std::string truth;
};

std::vector<int> read_prediction_labels(const std::string &path) {
    auto in = detail::open_in(path);
    std::string line;
    if (!std::getline(in, line) || detail::trim(line) != "score,label") {
        throw Error(ErrorKind::Format, "'" + path + "' must start with the header score,label");
    }
    std::vector<int> labels;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (detail::trim(line).empty()) {
            continue;
        }
        const auto fields = detail::split_commas(line);
        if (fields.size() != 2 || (fields[1] != "1" && fields[1] != "-1")) {
            throw Error(ErrorKind::InvalidLabel, "'" + path + "' line " + std::to_string(line_no) +
                                                     ": expected score,label with label 1 or -1");
        }
        labels.push_back(fields[1] == "1" ? 1 : -1);
    }
    return labels;
}

void run_eval(const EvalArgs &a) {
    const auto predicted = read_prediction_labels(a.preds);
    const EvalDataset truth = from_file(a.truth, load_eval_csv);
    const ConfusionCounts c = confusion(predicted, truth.labels);
    std::cout << "f1=" << detail::format_real(f1_score(c)) << " tp=" << c.tp << " fp=" << c.fp << " fn=" << c.fn
              << " tn=" << c.tn << '\n';
}

struct TuneArgs {
    std::string data;
    std::string model;
    std::string preset{"synthetic"};
    std::string scenario{"single-training-set"};
    int folds{4};
    std::uint64_t seed{0};
    std::string out;
    FitArgs fit;
};

nlohmann::json scored_json(const ScoredCandidate &s) {
    return nlohmann::json{{"lambda", s.candidate.lambda},
                          {"sigma", s.candidate.sigma},
                          {"cu", s.candidate.cu},
                          {"puf", std::isfinite(s.score) ? nlohmann::json(s.score) : nlohmann::json(nullptr)}};
}

void run_tune(const TuneArgs &a) {
    TuneSettings s;
    s.kind = parse_model_kind(a.model);
    s.scenario = parse_scenario(a.scenario);
    s.folds = a.folds;
    s.seed = a.seed;
    s.cp = a.fit.cp;
    s.mu1 = a.fit.mu1;
    s.k = a.fit.knn;
    s.ridge = a.fit.ridge;
    s.stop = StopCriteria{a.fit.tol, a.fit.max_iter, false};
    s.options.standardize = !a.fit.no_standardize;
    const GridSpec grid = GridSpec::preset(a.preset);
    const TuneResult r = tune(from_file(a.data, load_pu_csv), grid, s);

    nlohmann::json j;
    j["model_kind"] = std::string(to_string(s.kind));
    j["scenario"] = std::string(to_string(s.scenario));
    j["preset"] = grid.name;
    j["folds"] = r.folds;
    j["seed"] = r.seed;
    j["best"] = scored_json(ScoredCandidate{r.best, r.best_score});
    j["grid_scores"] = nlohmann::json::array();
    for (const auto &g : r.grid_scores) {
        j["grid_scores"].push_back(scored_json(g));
    }
    j["greedy_trace"] = nlohmann::json::array();
    for (const auto &g : r.greedy_trace) {
        j["greedy_trace"].push_back(scored_json(g));
    }
    open_output(a.out) << j.dump(1) << '\n';
    std::cout << "best lambda=" << r.best.lambda << " sigma=" << r.best.sigma << " cu=" << r.best.cu
              << " puf=" << r.best_score << '\n';
}

struct Table1Args {
    std::string out_dir{"."};
    std::uint64_t seed{0};
    bool reduced{false};
    bool rbf{false};
    int datasets{5};
    int jobs{1};
    FitArgs fit;
};

void run_table1_cmd(const Table1Args &a) {
    Table1Options opt;
    opt.seed = a.seed;
    opt.datasets = a.datasets;
    opt.jobs = a.jobs;
    opt.kernel = a.rbf;
    opt.grid = a.reduced ? GridSpec::reduced() : GridSpec::synthetic();
    opt.settings.cp = a.fit.cp;
    opt.settings.mu1 = a.fit.mu1;
    opt.settings.k = a.fit.knn;
    opt.settings.ridge = a.fit.ridge;
    opt.settings.stop = StopCriteria{a.fit.tol, a.fit.max_iter, false};
    opt.settings.options.standardize = !a.fit.no_standardize;
    opt.progress = [](const std::string &line) { std::cerr << line << '\n'; };
    const Table1Report report = run_table1(opt);

    std::filesystem::create_directories(a.out_dir);
    const std::string path = (std::filesystem::path(a.out_dir) /
                              (std::string("table1_") + (a.rbf ? "rbf" : "linear") + (a.reduced ? "_reduced" : "") +
                               ".csv"))
                                 .string();
    auto out = open_output(path);
    write_table1_report(out, report);
    std::cout << format_table1(report) << "report: " << path << '\n';
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"PU learning with asymmetric loss (PUAL) and the GLLC baseline"};
    app.config_formatter(std::make_shared<JsonConfig>());
    app.set_config("--config", "", "JSON file with defaults; explicit flags win");
    app.require_subcommand(1);

    SynthArgs synth;
    auto *c_synth = app.add_subcommand("synth", "generate the synthetic trifurcate dataset");
    c_synth->add_option("--mean-p2", synth.mean_p2, "centre coordinate of the far positive cluster")
        ->check(CLI::Number);
    c_synth->add_option("--seed", synth.seed, "random seed");
    c_synth->add_option("--out", synth.out, "output CSV (features, label in {1,-1})")->required();

    SplitArgs split_args;
    auto *c_split = app.add_subcommand("split", "split a labeled dataset into PU training and test files");
    c_split->add_option("--mode", split_args.mode, "single-training-set or case-control")
        ->check(CLI::IsMember({"single-training-set", "case-control"}));
    c_split->add_option("--gamma-prime", split_args.gamma_prime, "labeled share of all positives (case-control)");
    c_split->add_option("--labeled-fraction", split_args.labeled_fraction,
                        "labeled share of training positives (single-training-set, default 1/4)");
    c_split->add_option("--test-fraction", split_args.test_fraction, "held-out share");
    c_split->add_option("--seed", split_args.seed, "random seed");
    c_split->add_option("--in", split_args.in, "input CSV with labels 1/-1")->required();
    c_split->add_option("--train-out", split_args.train_out, "PU training CSV (labels p/u)")->required();
    c_split->add_option("--test-out", split_args.test_out, "test CSV with labels 1/-1")->required();

    TrainArgs train;
    auto *c_train = app.add_subcommand("train", "fit a model and save it as JSON");
    c_train->add_option("--model", train.model, "pual-linear, pual-kernel, gllc-linear or gllc-kernel")
        ->required()
        ->check(CLI::IsMember({"pual-linear", "pual-kernel", "gllc-linear", "gllc-kernel"}));
    c_train->add_option("--data", train.data, "PU training CSV")->required();
    c_train->add_option("--kernel", train.kernel, "rbf, linear-via-b, precomputed or none")
        ->check(CLI::IsMember({"auto", "rbf", "linear-via-b", "precomputed", "none"}));
    c_train->add_option("--gram", train.gram, "square Gram CSV over the training rows, positives first");
    c_train->add_option("--out", train.out, "model file")->required();
    add_fit_flags(c_train, train.fit, true);

    PredictArgs predict_args;
    auto *c_predict = app.add_subcommand("predict", "score rows with a saved model");
    c_predict->add_option("--model", predict_args.model, "model file")->required();
    c_predict->add_option("--data", predict_args.data, "CSV of features (a trailing label column is ignored)")
        ->required();
    c_predict->add_option("--out", predict_args.out, "predictions CSV (score,label)")->required();

    EvalArgs eval_args;
    auto *c_eval = app.add_subcommand("eval", "F1 of predictions against ground truth");
    c_eval->add_option("--preds", eval_args.preds, "predictions CSV")->required();
    c_eval->add_option("--truth", eval_args.truth, "CSV with labels 1/-1")->required();

    TuneArgs tune_args;
    auto *c_tune = app.add_subcommand("tune", "cross-validated PUF-score search");
    c_tune->add_option("--data", tune_args.data, "PU training CSV")->required();
    c_tune->add_option("--model", tune_args.model, "model kind")
        ->required()
        ->check(CLI::IsMember({"pual-linear", "pual-kernel", "gllc-linear", "gllc-kernel"}));
    c_tune->add_option("--preset", tune_args.preset, "synthetic, real or reduced")
        ->check(CLI::IsMember({"synthetic", "real", "reduced"}));
    c_tune->add_option("--scenario", tune_args.scenario, "single-training-set or case-control")
        ->check(CLI::IsMember({"single-training-set", "case-control"}));
    c_tune->add_option("--folds", tune_args.folds, "number of folds")->check(CLI::Range(2, 1000));
    c_tune->add_option("--seed", tune_args.seed, "fold seed");
    c_tune->add_option("--out", tune_args.out, "tuning result JSON")->required();
    add_fit_flags(c_tune, tune_args.fit, false);

    Table1Args t1;
    auto *c_t1 = app.add_subcommand("reproduce-table1", "PUAL vs GLLC on synthetic data across mean_p2");
    c_t1->add_option("--out-dir", t1.out_dir, "directory for the report");
    c_t1->add_option("--seed", t1.seed, "master seed");
    c_t1->add_flag("--reduced-grid", t1.reduced, "8 decades for lambda and sigma, 10 values for C_u");
    c_t1->add_flag("--rbf", t1.rbf, "rbf-kernel variants instead of linear ones");
    c_t1->add_option("--datasets", t1.datasets, "datasets per mean_p2")->check(CLI::PositiveNumber);
    c_t1->add_option("--jobs", t1.jobs, "worker threads")->check(CLI::PositiveNumber);
    add_fit_flags(c_t1, t1.fit, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp &e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp &e) {
        return app.exit(e);
    } catch (const CLI::ParseError &e) {
        std::string msg = e.what();
        std::replace(msg.begin(), msg.end(), '\n', ' ');
        std::cerr << "error: " << msg << '\n';
        return exit_usage;
    }

    try {
        if (c_synth->parsed()) {
            run_synth(synth);
        } else if (c_split->parsed()) {
            run_split(split_args);
        } else if (c_train->parsed()) {
            run_train(train);
        } else if (c_predict->parsed()) {
            run_predict(predict_args);
        } else if (c_eval->parsed()) {
            run_eval(eval_args);
        } else if (c_tune->parsed()) {
            run_tune(tune_args);
        } else if (c_t1->parsed()) {
            run_table1_cmd(t1);
        }
    } catch (const UsageError &e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_usage;
    } catch (const Error &e) {
        std::cerr << "error: " << e.what() << '\n';
        return static_cast<int>(e.category());
    } catch (const std::filesystem::filesystem_error &e) {
        std::cerr << "error: " << e.what() << '\n';
        return static_cast<int>(ErrorCategory::data);
    }
    return 0;
}
