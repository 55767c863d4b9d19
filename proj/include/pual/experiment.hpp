#ifndef PUAL_EXPERIMENT_HPP
#define PUAL_EXPERIMENT_HPP

#include "pual/dataset.hpp"
#include "pual/evaluation.hpp"
#include "pual/gllc.hpp"
#include "pual/pual_kernel.hpp"
#include "pual/pual_linear.hpp"
#include "pual/random.hpp"

#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <future>
#include <iomanip>
#include <mutex>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace pual {

/// Synthetic PUAL-vs-GLLC study: for each mean_p2, `datasets` draws of the
/// trifurcate data, a single-training-set split, PUF-tuned fits of both models
/// and test F1.
struct Table1Options {
    std::vector<double> mean_p2{50.0, 100.0, 200.0, 500.0, 1000.0};
    int datasets{5};
    std::uint64_t seed{0};
    GridSpec grid{GridSpec::synthetic()};
    bool kernel{false};  // rbf variants instead of linear ones
    TuneSettings settings{};
    int jobs{1};
    std::function<void(const std::string &)> progress;
};

struct FitOutcome {
    Candidate best;
    double cv_puf{0.0};
    double f1{0.0};
    int iterations{0};
    bool converged{true};
    double primal_residual{0.0};
    double objective{0.0};       // training objective at the returned model (linear PUAL only)
    double zero_objective{0.0};  // the same objective at beta = 0, beta0 = 0
};

struct Table1Run {
    double mean_p2{0.0};
    int dataset{0};
    std::uint64_t data_seed{0};
    std::uint64_t split_seed{0};
    std::uint64_t cv_seed{0};
    FitOutcome pual;
    FitOutcome gllc;
};

struct CellSummary {
    double mean{0.0};
    double std{0.0};  // sample standard deviation
    int n{0};
};

inline CellSummary summarize(const std::vector<double> &values) {
    CellSummary s;
    s.n = static_cast<int>(values.size());
    if (values.empty()) {
        return s;
    }
    for (const double v : values) {
        s.mean += v;
    }
    s.mean /= s.n;
    if (s.n > 1) {
        double ss = 0.0;
        for (const double v : values) {
            ss += (v - s.mean) * (v - s.mean);
        }
        s.std = std::sqrt(ss / (s.n - 1));
    }
    return s;
}

struct Table1Row {
    double mean_p2{0.0};
    CellSummary pual;  // F1 in percent
    CellSummary gllc;
};

struct Table1Report {
    Table1Options options;
    std::vector<Table1Run> runs;

    [[nodiscard]] std::vector<Table1Row> rows() const {
        std::vector<Table1Row> out;
        for (const double mp2 : options.mean_p2) {
            std::vector<double> p;
            std::vector<double> g;
            for (const auto &r : runs) {
                if (r.mean_p2 == mp2) {
                    p.push_back(100.0 * r.pual.f1);
                    g.push_back(100.0 * r.gllc.f1);
                }
            }
            out.push_back(Table1Row{mp2, summarize(p), summarize(g)});
        }
        return out;
    }
};

namespace detail {

inline FitOutcome tuned_fit(const SplitResult &split, ModelKind kind, const Table1Options &opt, std::uint64_t cv_seed) {
    TuneSettings settings = opt.settings;
    settings.kind = kind;
    settings.scenario = PufScenario::single_training_set;
    settings.seed = cv_seed;
    const TuneResult tuned = tune(split.train, opt.grid, settings);

    FitOutcome out;
    out.best = tuned.best;
    out.cv_puf = tuned.best_score;
    const Hyperparams hp = hyperparams_for(tuned.best, settings);
    StopCriteria stop = settings.stop;
    stop.record_objective = false;
    Prediction pred;
    try {
        switch (kind) {
            case ModelKind::pual_linear: {
                const auto fit = fit_linear(split.train, hp, stop, settings.options);
                const PUDataset scaled = fit.model.standardizer.apply(split.train);
                const LaplacianMatrix lap = build_laplacian(scaled.stacked(), hp.knn);
                out.objective = objective_value(scaled, lap, hp, fit.model.beta, fit.model.beta0);
                out.zero_objective = objective_value(scaled, lap, hp, Vector::Zero(scaled.m()), 0.0);
                out.iterations = fit.report.iterations;
                out.converged = fit.report.converged;
                out.primal_residual = fit.report.final_primal_residual;
                pred = predict_linear(fit.model, split.test.features);
                break;
            }
            case ModelKind::pual_kernel: {
                const auto fit = fit_kernel(split.train, hp, kernel_for(tuned.best, settings), stop, settings.options);
                out.iterations = fit.report.iterations;
                out.converged = fit.report.converged;
                out.primal_residual = fit.report.final_primal_residual;
                pred = predict_kernel(fit.model, split.test.features);
                break;
            }
            case ModelKind::gllc_linear:
                pred = predict(fit_gllc_linear(split.train, hp, settings.options), split.test.features);
                break;
            case ModelKind::gllc_kernel:
                pred = predict(fit_gllc_kernel(split.train, hp, kernel_for(tuned.best, settings), settings.options),
                               split.test.features);
                break;
        }
    } catch (const Error &) {
        // every grid candidate failed; an all-negative prediction scores F1 = 0
        pred.labels.assign(split.test.labels.size(), -1);
        out.converged = false;
    }
    out.f1 = f1_score(confusion(pred.labels, split.test.labels));
    return out;
}

}  // namespace detail

inline Table1Run run_table1_cell(const Table1Options &opt, std::size_t mp2_index, int dataset) {
    Table1Run run;
    run.mean_p2 = opt.mean_p2.at(mp2_index);
    run.dataset = dataset;
    run.data_seed = SplitMix64::derive(opt.seed, 1000 * mp2_index + static_cast<std::uint64_t>(dataset));
    run.split_seed = SplitMix64::derive(run.data_seed, 1);
    run.cv_seed = SplitMix64::derive(run.data_seed, 2);

    const EvalDataset data = synth_generate(SynthSpec{run.mean_p2, run.data_seed});
    const SplitResult split = split_single_training_set(data, SplitSpec::single_training_set({1, 4}, run.split_seed));
    run.pual = detail::tuned_fit(split, opt.kernel ? ModelKind::pual_kernel : ModelKind::pual_linear, opt, run.cv_seed);
    run.gllc = detail::tuned_fit(split, opt.kernel ? ModelKind::gllc_kernel : ModelKind::gllc_linear, opt, run.cv_seed);
    return run;
}

/// Runs every (mean_p2, dataset) cell; `jobs` > 1 spreads cells over threads.
/// Results do not depend on `jobs`.
inline Table1Report run_table1(const Table1Options &opt) {
    opt.grid.validate();
    if (opt.datasets < 1) {
        throw Error(ErrorKind::InvalidArgument, "need at least one dataset per mean_p2");
    }
    struct Job {
        std::size_t mp2_index;
        int dataset;
    };
    std::vector<Job> jobs;
    for (std::size_t i = 0; i < opt.mean_p2.size(); ++i) {
        for (int d = 0; d < opt.datasets; ++d) {
            jobs.push_back(Job{i, d});
        }
    }
    Table1Report report{opt, std::vector<Table1Run>(jobs.size())};
    std::mutex log_mutex;
    const auto work = [&](std::size_t j) {
        report.runs[j] = run_table1_cell(opt, jobs[j].mp2_index, jobs[j].dataset);
        if (opt.progress) {
            const auto &r = report.runs[j];
            std::ostringstream msg;
            msg << "mean_p2=" << r.mean_p2 << " dataset=" << r.dataset << " pual_f1=" << r.pual.f1
                << " gllc_f1=" << r.gllc.f1;
            const std::lock_guard lock(log_mutex);
            opt.progress(msg.str());
        }
    };
    const auto workers = static_cast<std::size_t>(std::max(1, opt.jobs));
    if (workers == 1) {
        for (std::size_t j = 0; j < jobs.size(); ++j) {
            work(j);
        }
        return report;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::future<void>> pool;
    for (std::size_t w = 0; w < workers; ++w) {
        pool.push_back(std::async(std::launch::async, [&] {
            for (std::size_t j = next++; j < jobs.size(); j = next++) {
                work(j);
            }
        }));
    }
    for (auto &f : pool) {
        f.get();
    }
    return report;
}

/// Summary table (percent F1, mean, sample std, n) followed by one line per run
/// with the seeds and selected hyperparameters.
inline void write_table1_report(std::ostream &out, const Table1Report &report) {
    const auto &opt = report.options;
    out << "# PUAL vs GLLC, synthetic trifurcate data, test F1 in percent\n";
    out << "# variant: " << (opt.kernel ? "rbf" : "linear") << "  grid: " << opt.grid.name << " (" << opt.grid.size()
        << " candidates" << (opt.grid.greedy ? " + greedy" : "") << ")  folds: " << opt.settings.folds
        << "  master_seed: " << opt.seed << "  standardize: " << (opt.settings.options.standardize ? "on" : "off");
    if (opt.kernel) {
        out << "  ridge: " << opt.settings.ridge;
    }
    out << '\n';
    if (opt.grid.name != "synthetic") {
        out << "# reduced search: compare only the sign of PUAL - GLLC and the trend of the gap, not the levels\n";
    }
    out << "mean_p2,pual_mean,pual_std,pual_n,gllc_mean,gllc_std,gllc_n\n";
    out << std::setprecision(10);
    for (const auto &row : report.rows()) {
        out << row.mean_p2 << ',' << row.pual.mean << ',' << row.pual.std << ',' << row.pual.n << ','
            << row.gllc.mean << ',' << row.gllc.std << ',' << row.gllc.n << '\n';
    }
    out << "\nmean_p2,dataset,data_seed,split_seed,cv_seed,"
           "pual_lambda,pual_sigma,pual_cu,pual_cv_puf,pual_f1,pual_iterations,pual_converged,pual_residual,"
           "gllc_lambda,gllc_sigma,gllc_cu,gllc_cv_puf,gllc_f1\n";
    for (const auto &r : report.runs) {
        out << r.mean_p2 << ',' << r.dataset << ',' << r.data_seed << ',' << r.split_seed << ',' << r.cv_seed << ','
            << r.pual.best.lambda << ',' << r.pual.best.sigma << ',' << r.pual.best.cu << ',' << r.pual.cv_puf << ','
            << r.pual.f1 << ',' << r.pual.iterations << ',' << (r.pual.converged ? 1 : 0) << ','
            << r.pual.primal_residual << ',' << r.gllc.best.lambda << ',' << r.gllc.best.sigma << ','
            << r.gllc.best.cu << ',' << r.gllc.cv_puf << ',' << r.gllc.f1 << '\n';
    }
}

/// Table 1 as printed: "mean ± std" per cell.
inline std::string format_table1(const Table1Report &report) {
    std::ostringstream out;
    out << std::fixed << std::setprecision(2);
    out << "mean_p2    PUAL              GLLC\n";
    for (const auto &row : report.rows()) {
        out << std::left << std::setw(10) << row.mean_p2 << ' ' << std::right << std::setw(6) << row.pual.mean
            << " ± " << std::setw(5) << row.pual.std << "    " << std::setw(6) << row.gllc.mean << " ± "
            << std::setw(5) << row.gllc.std << '\n';
    }
    return out.str();
}

}  // namespace pual

#endif  // PUAL_EXPERIMENT_HPP
