#ifndef PUAL_DATASET_HPP
#define PUAL_DATASET_HPP

#include "pual/common.hpp"
#include "pual/error.hpp"
#include "pual/random.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <numeric>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace pual {

/// Labeled-positive block X_[p] and unlabeled block X_[u] sharing m columns.
/// The stacked matrix X_[pu] always lists the positives first.
struct PUDataset {
    Matrix features_p;
    Matrix features_u;
    std::vector<std::string> feature_names;

    [[nodiscard]] Eigen::Index n_p() const noexcept { return features_p.rows(); }
    [[nodiscard]] Eigen::Index n_u() const noexcept { return features_u.rows(); }
    [[nodiscard]] Eigen::Index n() const noexcept { return n_p() + n_u(); }
    [[nodiscard]] Eigen::Index m() const noexcept { return features_p.cols(); }

    [[nodiscard]] Matrix stacked() const {
        Matrix out(n(), m());
        out.topRows(n_p()) = features_p;
        out.bottomRows(n_u()) = features_u;
        return out;
    }

    /// Throws unless both blocks are non-empty, share m >= 1 columns and are finite.
    void validate() const {
        if (n_p() < 1 || n_u() < 1) {
            throw Error(n_p() < 1 ? ErrorKind::NoLabeledPositives : ErrorKind::NoUnlabeled,
                        "PU dataset needs at least one labeled-positive and one unlabeled row");
        }
        if (features_p.cols() != features_u.cols() || features_p.cols() < 1) {
            throw Error(ErrorKind::DimensionMismatch, "labeled and unlabeled blocks have different widths");
        }
        if (!features_p.allFinite() || !features_u.allFinite()) {
            throw Error(ErrorKind::NonNumericFeature, "non-finite feature value");
        }
        if (!feature_names.empty() && static_cast<Eigen::Index>(feature_names.size()) != m()) {
            throw Error(ErrorKind::DimensionMismatch, "feature name count does not match width");
        }
    }
};

/// Features with ground-truth labels in {+1, -1}.
struct EvalDataset {
    Matrix features;
    std::vector<int> labels;
    std::vector<std::string> feature_names;

    [[nodiscard]] Eigen::Index n() const noexcept { return features.rows(); }
    [[nodiscard]] Eigen::Index m() const noexcept { return features.cols(); }

    [[nodiscard]] Eigen::Index count(int label) const {
        return static_cast<Eigen::Index>(std::count(labels.begin(), labels.end(), label));
    }
};

struct SynthSpec {
    double mean_p2{50.0};
    std::uint64_t seed{0};
};

enum class SplitMode { single_training_set, case_control };

struct SplitSpec {
    SplitMode mode{SplitMode::single_training_set};
    std::optional<Fraction> gamma_prime;       // case-control only
    std::optional<Fraction> labeled_fraction;  // single-training-set only
    Fraction test_fraction{3, 10};
    std::uint64_t seed{0};

    static SplitSpec single_training_set(Fraction labeled = {1, 4}, std::uint64_t seed = 0) {
        return SplitSpec{SplitMode::single_training_set, std::nullopt, labeled, Fraction{3, 10}, seed};
    }
    static SplitSpec case_control(Fraction gamma_prime, std::uint64_t seed = 0) {
        return SplitSpec{SplitMode::case_control, gamma_prime, std::nullopt, Fraction{3, 10}, seed};
    }

    void validate() const {
        const auto in_half_open = [](const Fraction &f) { return f.num > 0 && f.num <= f.den; };
        if (!(test_fraction.num > 0 && test_fraction.num < test_fraction.den)) {
            throw Error(ErrorKind::InvalidArgument, "test fraction must lie in (0, 1)");
        }
        if (mode == SplitMode::single_training_set) {
            if (!labeled_fraction || gamma_prime || !in_half_open(*labeled_fraction)) {
                throw Error(ErrorKind::InvalidArgument,
                            "single-training-set split needs only a labeled fraction in (0, 1]");
            }
        } else {
            if (!gamma_prime || labeled_fraction || !in_half_open(*gamma_prime)) {
                throw Error(ErrorKind::InvalidArgument, "case-control split needs only gamma' in (0, 1]");
            }
        }
    }
};

/// Label frequency of a case-control split: gamma = g / (t*g + (1 - t)), t the test fraction.
inline double case_control_label_frequency(double gamma_prime, double test_fraction = 0.3) {
    return gamma_prime / (test_fraction * gamma_prime + (1.0 - test_fraction));
}

// ---------------------------------------------------------------------------
// CSV

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
        s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    return s;
}

inline std::vector<std::string_view> split_commas(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        fields.push_back(trim(line.substr(start, comma == std::string_view::npos ? line.npos : comma - start)));
        if (comma == std::string_view::npos) {
            break;
        }
        start = comma + 1;
    }
    return fields;
}

inline double parse_real(std::string_view token, std::size_t line_no) {
    double value{};
    const char *first = token.data();
    if (!token.empty() && token.front() == '+') {
        ++first;
    }
    const auto [ptr, ec] = std::from_chars(first, token.data() + token.size(), value);
    if (ec != std::errc{} || ptr != token.data() + token.size() || token.empty() || !std::isfinite(value)) {
        throw Error(ErrorKind::NonNumericFeature,
                    "line " + std::to_string(line_no) + ": '" + std::string(token) + "' is not a finite real");
    }
    return value;
}

inline std::string format_real(double value) {
    char buffer[64];
    const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
    return std::string(buffer, ptr);
}

struct RawTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
    std::vector<std::string> labels;
};

/// Header mandatory, last column named `label`; every other field a finite real.
inline RawTable read_labeled_table(std::istream &in) {
    RawTable table;
    std::string line;
    std::size_t line_no = 0;
    bool have_header = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) {
            continue;
        }
        const auto fields = split_commas(line);
        if (!have_header) {
            if (fields.size() < 2 || fields.back() != "label") {
                throw Error(ErrorKind::Format, "header must have at least one feature and end with 'label'");
            }
            for (std::size_t i = 0; i + 1 < fields.size(); ++i) {
                table.header.emplace_back(fields[i]);
            }
            have_header = true;
            continue;
        }
        if (fields.size() != table.header.size() + 1) {
            throw Error(ErrorKind::RaggedRow, "line " + std::to_string(line_no) + " has " +
                                                  std::to_string(fields.size()) + " fields, expected " +
                                                  std::to_string(table.header.size() + 1));
        }
        std::vector<double> row;
        row.reserve(table.header.size());
        for (std::size_t i = 0; i + 1 < fields.size(); ++i) {
            row.push_back(parse_real(fields[i], line_no));
        }
        table.rows.push_back(std::move(row));
        table.labels.emplace_back(fields.back());
    }
    if (!have_header) {
        throw Error(ErrorKind::EmptyDataset, "missing header row");
    }
    if (table.rows.empty()) {
        throw Error(ErrorKind::EmptyDataset, "no data rows");
    }
    return table;
}

inline Matrix gather_rows(const std::vector<std::vector<double>> &rows, const std::vector<std::size_t> &which,
                          Eigen::Index m) {
    Matrix out(static_cast<Eigen::Index>(which.size()), m);
    for (std::size_t r = 0; r < which.size(); ++r) {
        for (Eigen::Index c = 0; c < m; ++c) {
            out(static_cast<Eigen::Index>(r), c) = rows[which[r]][static_cast<std::size_t>(c)];
        }
    }
    return out;
}

inline std::vector<std::string> default_names(Eigen::Index m) {
    std::vector<std::string> names;
    for (Eigen::Index i = 0; i < m; ++i) {
        names.push_back("f" + std::to_string(i + 1));
    }
    return names;
}

inline void write_header(std::ostream &out, const std::vector<std::string> &names, Eigen::Index m) {
    const auto header = names.empty() ? default_names(m) : names;
    for (const auto &name : header) {
        out << name << ',';
    }
    out << "label\n";
}

inline void write_row(std::ostream &out, const Eigen::Ref<const RowVector> &row) {
    for (Eigen::Index c = 0; c < row.size(); ++c) {
        out << format_real(row(c)) << ',';
    }
}

inline std::ifstream open_in(const std::string &path) {
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorKind::Io, "cannot open '" + path + "' for reading");
    }
    return in;
}

inline std::ofstream open_out(const std::string &path) {
    std::ofstream out(path);
    if (!out) {
        throw Error(ErrorKind::Io, "cannot open '" + path + "' for writing");
    }
    return out;
}

}  // namespace detail

/// Rows labelled `p` fill X_[p] and rows labelled `u` fill X_[u], each in file order.
inline PUDataset read_pu_csv(std::istream &in) {
    const auto table = detail::read_labeled_table(in);
    std::vector<std::size_t> p_rows;
    std::vector<std::size_t> u_rows;
    for (std::size_t i = 0; i < table.labels.size(); ++i) {
        if (table.labels[i] == "p") {
            p_rows.push_back(i);
        } else if (table.labels[i] == "u") {
            u_rows.push_back(i);
        } else {
            throw Error(ErrorKind::InvalidLabel, "label '" + table.labels[i] + "' is not one of {p, u}");
        }
    }
    const auto m = static_cast<Eigen::Index>(table.header.size());
    PUDataset data{detail::gather_rows(table.rows, p_rows, m), detail::gather_rows(table.rows, u_rows, m),
                   table.header};
    if (data.n_p() == 0) {
        throw Error(ErrorKind::NoLabeledPositives, "no rows labelled 'p'");
    }
    if (data.n_u() == 0) {
        throw Error(ErrorKind::NoUnlabeled, "no rows labelled 'u'");
    }
    return data;
}

inline PUDataset load_pu_csv(const std::string &path) {
    auto in = detail::open_in(path);
    return read_pu_csv(in);
}

inline void write_pu_csv(std::ostream &out, const PUDataset &data) {
    detail::write_header(out, data.feature_names, data.m());
    for (Eigen::Index r = 0; r < data.n_p(); ++r) {
        detail::write_row(out, data.features_p.row(r));
        out << "p\n";
    }
    for (Eigen::Index r = 0; r < data.n_u(); ++r) {
        detail::write_row(out, data.features_u.row(r));
        out << "u\n";
    }
}

inline void save_pu_csv(const std::string &path, const PUDataset &data) {
    auto out = detail::open_out(path);
    write_pu_csv(out, data);
}

inline EvalDataset read_eval_csv(std::istream &in) {
    const auto table = detail::read_labeled_table(in);
    std::vector<std::size_t> all(table.rows.size());
    std::iota(all.begin(), all.end(), std::size_t{0});
    EvalDataset data{detail::gather_rows(table.rows, all, static_cast<Eigen::Index>(table.header.size())), {},
                     table.header};
    for (const auto &label : table.labels) {
        if (label == "1" || label == "+1") {
            data.labels.push_back(1);
        } else if (label == "-1") {
            data.labels.push_back(-1);
        } else {
            throw Error(ErrorKind::InvalidLabel, "label '" + label + "' is not one of {1, -1}");
        }
    }
    return data;
}

inline EvalDataset load_eval_csv(const std::string &path) {
    auto in = detail::open_in(path);
    return read_eval_csv(in);
}

/// Feature rows for scoring. A trailing `label` column, if present, is ignored,
/// so PU files, ground-truth files and bare feature files are all accepted.
inline Matrix read_feature_csv(std::istream &in) {
    std::string line;
    std::size_t line_no = 0;
    std::size_t width = 0;
    bool drop_last = false;
    bool have_header = false;
    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        ++line_no;
        if (detail::trim(line).empty()) {
            continue;
        }
        const auto fields = detail::split_commas(line);
        if (!have_header) {
            drop_last = fields.back() == "label";
            width = fields.size() - (drop_last ? 1 : 0);
            if (width == 0) {
                throw Error(ErrorKind::Format, "header names no feature columns");
            }
            have_header = true;
            continue;
        }
        if (fields.size() != width + (drop_last ? 1 : 0)) {
            throw Error(ErrorKind::RaggedRow, "line " + std::to_string(line_no) + " has " +
                                                  std::to_string(fields.size()) + " fields");
        }
        std::vector<double> row;
        for (std::size_t i = 0; i < width; ++i) {
            row.push_back(detail::parse_real(fields[i], line_no));
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) {
        throw Error(ErrorKind::EmptyDataset, "no data rows");
    }
    std::vector<std::size_t> all(rows.size());
    for (std::size_t i = 0; i < all.size(); ++i) {
        all[i] = i;
    }
    return detail::gather_rows(rows, all, static_cast<Eigen::Index>(width));
}

inline Matrix load_feature_csv(const std::string &path) {
    auto in = detail::open_in(path);
    return read_feature_csv(in);
}

/// Headerless CSV of finite reals, all rows of equal length (e.g. a Gram matrix).
inline Matrix read_matrix_csv(std::istream &in) {
    std::string line;
    std::size_t line_no = 0;
    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        ++line_no;
        if (detail::trim(line).empty()) {
            continue;
        }
        const auto fields = detail::split_commas(line);
        if (!rows.empty() && fields.size() != rows.front().size()) {
            throw Error(ErrorKind::RaggedRow, "line " + std::to_string(line_no) + " has " +
                                                  std::to_string(fields.size()) + " fields, expected " +
                                                  std::to_string(rows.front().size()));
        }
        std::vector<double> row;
        for (const auto field : fields) {
            row.push_back(detail::parse_real(field, line_no));
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) {
        throw Error(ErrorKind::EmptyDataset, "no rows");
    }
    std::vector<std::size_t> all(rows.size());
    std::iota(all.begin(), all.end(), std::size_t{0});
    return detail::gather_rows(rows, all, static_cast<Eigen::Index>(rows.front().size()));
}

inline Matrix load_matrix_csv(const std::string &path) {
    auto in = detail::open_in(path);
    return read_matrix_csv(in);
}

inline void write_eval_csv(std::ostream &out, const EvalDataset &data) {
    detail::write_header(out, data.feature_names, data.m());
    for (Eigen::Index r = 0; r < data.n(); ++r) {
        detail::write_row(out, data.features.row(r));
        out << (data.labels[static_cast<std::size_t>(r)] > 0 ? "1" : "-1") << '\n';
    }
}

inline void save_eval_csv(const std::string &path, const EvalDataset &data) {
    auto out = detail::open_out(path);
    write_eval_csv(out, data);
}

// ---------------------------------------------------------------------------
// Standardization

/// Column z-scores fitted on X_[pu] (population standard deviation).
/// Constant columns are flagged and map to zero.
struct Standardizer {
    Vector means;
    Vector std_devs;
    std::vector<bool> constant;

    [[nodiscard]] Eigen::Index m() const noexcept { return means.size(); }

    static Standardizer identity(Eigen::Index m) {
        return Standardizer{Vector::Zero(m), Vector::Ones(m), std::vector<bool>(static_cast<std::size_t>(m), false)};
    }

    [[nodiscard]] bool is_identity() const {
        return means.isZero(0.0) && (std_devs.array() == 1.0).all() &&
               std::none_of(constant.begin(), constant.end(), [](bool c) { return c; });
    }

    [[nodiscard]] Matrix apply(const Matrix &features) const {
        if (features.cols() != m()) {
            throw Error(ErrorKind::DimensionMismatch, "standardizer fitted on " + std::to_string(m()) +
                                                          " columns, got " + std::to_string(features.cols()));
        }
        Matrix out(features.rows(), features.cols());
        for (Eigen::Index c = 0; c < m(); ++c) {
            if (constant[static_cast<std::size_t>(c)]) {
                out.col(c).setZero();
            } else {
                out.col(c) = (features.col(c).array() - means(c)) / std_devs(c);
            }
        }
        return out;
    }

    [[nodiscard]] PUDataset apply(const PUDataset &data) const {
        return PUDataset{apply(data.features_p), apply(data.features_u), data.feature_names};
    }
};

inline Standardizer fit_standardizer(const Matrix &features) {
    if (features.rows() < 1) {
        throw Error(ErrorKind::EmptyDataset, "cannot fit a standardizer on zero rows");
    }
    const auto n = static_cast<double>(features.rows());
    Standardizer s{features.colwise().mean().transpose(), Vector(features.cols()),
                   std::vector<bool>(static_cast<std::size_t>(features.cols()), false)};
    for (Eigen::Index c = 0; c < features.cols(); ++c) {
        const double var = (features.col(c).array() - s.means(c)).square().sum() / n;
        const double sd = std::sqrt(var);
        const double scale = std::max(1.0, std::abs(s.means(c)));
        if (sd <= 1e-12 * scale) {
            s.constant[static_cast<std::size_t>(c)] = true;
            s.std_devs(c) = 1.0;
        } else {
            s.std_devs(c) = sd;
        }
    }
    return s;
}

inline Standardizer fit_standardizer(const PUDataset &train) { return fit_standardizer(train.stacked()); }

// ---------------------------------------------------------------------------
// Synthetic trifurcate data

/// 200 positives around (15, 15), 200 positives around (mean_p2, mean_p2), both
/// with covariance 50*I, and 400 negatives around the origin with covariance
/// [[50, 0.2], [0.2, 50]]. Rows are emitted in that order.
inline EvalDataset synth_generate(const SynthSpec &spec) {
    if (!std::isfinite(spec.mean_p2)) {
        throw Error(ErrorKind::InvalidArgument, "mean_p2 must be finite");
    }
    constexpr Eigen::Index cluster = 200;
    constexpr Eigen::Index negatives = 400;
    constexpr double variance = 50.0;
    constexpr double covariance = 0.2;

    EvalDataset data{Matrix(2 * cluster + negatives, 2), {}, {"x1", "x2"}};
    data.labels.reserve(static_cast<std::size_t>(data.features.rows()));
    SplitMix64 rng(spec.seed);

    const double sd = std::sqrt(variance);
    Eigen::Index row = 0;
    const auto isotropic = [&](double cx, double cy, Eigen::Index count, int label) {
        for (Eigen::Index i = 0; i < count; ++i, ++row) {
            const auto [z1, z2] = rng.normal_pair();
            data.features(row, 0) = cx + sd * z1;
            data.features(row, 1) = cy + sd * z2;
            data.labels.push_back(label);
        }
    };
    isotropic(15.0, 15.0, cluster, 1);
    isotropic(spec.mean_p2, spec.mean_p2, cluster, 1);

    // Cholesky factor of [[v, c], [c, v]].
    const double l11 = sd;
    const double l21 = covariance / l11;
    const double l22 = std::sqrt(variance - l21 * l21);
    for (Eigen::Index i = 0; i < negatives; ++i, ++row) {
        const auto [z1, z2] = rng.normal_pair();
        data.features(row, 0) = l11 * z1;
        data.features(row, 1) = l21 * z1 + l22 * z2;
        data.labels.push_back(-1);
    }
    return data;
}

// ---------------------------------------------------------------------------
// Splits

struct SplitResult {
    PUDataset train;
    EvalDataset test;
    /// Row indices of the input that ended up in each block, for auditing.
    std::vector<std::size_t> labeled_rows;
    std::vector<std::size_t> unlabeled_rows;
    std::vector<std::size_t> test_rows;
    /// Fraction of training positives that are labeled.
    [[nodiscard]] double label_frequency(const EvalDataset &source) const {
        std::size_t hidden = 0;
        for (const auto r : unlabeled_rows) {
            hidden += source.labels[r] > 0 ? 1 : 0;
        }
        return static_cast<double>(labeled_rows.size()) / static_cast<double>(labeled_rows.size() + hidden);
    }
};

namespace detail {

inline Matrix rows_of(const Matrix &features, const std::vector<std::size_t> &rows) {
    Matrix out(static_cast<Eigen::Index>(rows.size()), features.cols());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        out.row(static_cast<Eigen::Index>(i)) = features.row(static_cast<Eigen::Index>(rows[i]));
    }
    return out;
}

inline SplitResult assemble_split(const EvalDataset &data, std::vector<std::size_t> labeled,
                                  std::vector<std::size_t> unlabeled, std::vector<std::size_t> test) {
    SplitResult result;
    result.train = PUDataset{rows_of(data.features, labeled), rows_of(data.features, unlabeled), data.feature_names};
    result.test.features = rows_of(data.features, test);
    result.test.feature_names = data.feature_names;
    for (const auto r : test) {
        result.test.labels.push_back(data.labels[r]);
    }
    result.labeled_rows = std::move(labeled);
    result.unlabeled_rows = std::move(unlabeled);
    result.test_rows = std::move(test);
    return result;
}

}  // namespace detail

/// The whole training set is a uniform sample: take round((1-t)n) rows for
/// training, then label round(labeled_fraction * positives-in-train) of them.
inline SplitResult split_single_training_set(const EvalDataset &data, const SplitSpec &spec) {
    spec.validate();
    if (spec.mode != SplitMode::single_training_set) {
        throw Error(ErrorKind::InvalidArgument, "split mode must be single-training-set");
    }
    if (data.count(1) < 1) {
        throw Error(ErrorKind::NoLabeledPositives, "dataset has no positive rows");
    }
    const auto n = static_cast<std::size_t>(data.n());
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    SplitMix64 rng(spec.seed);
    fisher_yates(std::span(order), rng);

    const auto n_train = static_cast<std::size_t>(spec.test_fraction.complement().round_times(static_cast<std::int64_t>(n)));
    std::size_t train_positives = 0;
    for (std::size_t i = 0; i < n_train; ++i) {
        train_positives += data.labels[order[i]] > 0 ? 1 : 0;
    }
    const auto n_labeled =
        static_cast<std::size_t>(spec.labeled_fraction->round_times(static_cast<std::int64_t>(train_positives)));
    if (n_labeled == 0) {
        throw Error(ErrorKind::NoLabeledPositives, "labeled fraction yields zero labeled positives");
    }
    std::vector<std::size_t> labeled;
    std::vector<std::size_t> unlabeled;
    for (std::size_t i = 0; i < n_train; ++i) {
        const auto r = order[i];
        if (data.labels[r] > 0 && labeled.size() < n_labeled) {
            labeled.push_back(r);
        } else {
            unlabeled.push_back(r);
        }
    }
    if (unlabeled.empty()) {
        throw Error(ErrorKind::NoUnlabeled, "training set has no unlabeled rows");
    }
    std::vector<std::size_t> test(order.begin() + static_cast<std::ptrdiff_t>(n_train), order.end());
    return detail::assemble_split(data, std::move(labeled), std::move(unlabeled), std::move(test));
}

/// Only the unlabeled set is a population sample: label round(gamma' * P)
/// positives, pool the rest with all negatives, and split the pool into the
/// unlabeled training block and the test set.
inline SplitResult split_case_control(const EvalDataset &data, const SplitSpec &spec) {
    spec.validate();
    if (spec.mode != SplitMode::case_control) {
        throw Error(ErrorKind::InvalidArgument, "split mode must be case-control");
    }
    std::vector<std::size_t> positives;
    std::vector<std::size_t> negatives;
    for (std::size_t r = 0; r < data.labels.size(); ++r) {
        (data.labels[r] > 0 ? positives : negatives).push_back(r);
    }
    if (positives.empty()) {
        throw Error(ErrorKind::NoLabeledPositives, "dataset has no positive rows");
    }
    SplitMix64 rng(spec.seed);
    fisher_yates(std::span(positives), rng);
    const auto n_labeled =
        static_cast<std::size_t>(spec.gamma_prime->round_times(static_cast<std::int64_t>(positives.size())));
    if (n_labeled == 0) {
        throw Error(ErrorKind::NoLabeledPositives, "gamma' yields zero labeled positives");
    }
    std::vector<std::size_t> labeled(positives.begin(), positives.begin() + static_cast<std::ptrdiff_t>(n_labeled));
    std::vector<std::size_t> pool(positives.begin() + static_cast<std::ptrdiff_t>(n_labeled), positives.end());
    pool.insert(pool.end(), negatives.begin(), negatives.end());
    if (pool.empty()) {
        throw Error(ErrorKind::NoUnlabeled, "unlabeled pool is empty");
    }
    std::sort(pool.begin(), pool.end());
    fisher_yates(std::span(pool), rng);
    const auto n_train =
        static_cast<std::size_t>(spec.test_fraction.complement().round_times(static_cast<std::int64_t>(pool.size())));
    if (n_train == 0) {
        throw Error(ErrorKind::NoUnlabeled, "unlabeled training block is empty");
    }
    std::vector<std::size_t> unlabeled(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(n_train));
    std::vector<std::size_t> test(pool.begin() + static_cast<std::ptrdiff_t>(n_train), pool.end());
    return detail::assemble_split(data, std::move(labeled), std::move(unlabeled), std::move(test));
}

inline SplitResult split(const EvalDataset &data, const SplitSpec &spec) {
    return spec.mode == SplitMode::single_training_set ? split_single_training_set(data, spec)
                                                       : split_case_control(data, spec);
}

}  // namespace pual

#endif  // PUAL_DATASET_HPP
