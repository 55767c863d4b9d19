#ifndef PUAL_ERROR_HPP
#define PUAL_ERROR_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace pual {

enum class ErrorKind {
    // data
    EmptyDataset,
    InvalidLabel,
    NonNumericFeature,
    RaggedRow,
    NoLabeledPositives,
    NoUnlabeled,
    DimensionMismatch,
    TooFewInstances,
    EmptyPool,
    EmptyLabeledSet,
    FoldWithoutLabeledPositive,
    Io,
    Format,
    // validation
    InvalidArgument,
    NonPositiveSigma,
    NonPositiveWidth,
    NonPositiveC,
    UnsupportedForPrecomputed,
    // numerical
    SingularSystem,
    SingularB,
    InsufficientRank,
    DegenerateM22,
};

enum class ErrorCategory { usage = 1, data = 2, numerical = 3 };

constexpr std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::EmptyDataset: return "EmptyDataset";
        case ErrorKind::InvalidLabel: return "InvalidLabel";
        case ErrorKind::NonNumericFeature: return "NonNumericFeature";
        case ErrorKind::RaggedRow: return "RaggedRow";
        case ErrorKind::NoLabeledPositives: return "NoLabeledPositives";
        case ErrorKind::NoUnlabeled: return "NoUnlabeled";
        case ErrorKind::DimensionMismatch: return "DimensionMismatch";
        case ErrorKind::TooFewInstances: return "TooFewInstances";
        case ErrorKind::EmptyPool: return "EmptyPool";
        case ErrorKind::EmptyLabeledSet: return "EmptyLabeledSet";
        case ErrorKind::FoldWithoutLabeledPositive: return "FoldWithoutLabeledPositive";
        case ErrorKind::Io: return "Io";
        case ErrorKind::Format: return "Format";
        case ErrorKind::InvalidArgument: return "InvalidArgument";
        case ErrorKind::NonPositiveSigma: return "NonPositiveSigma";
        case ErrorKind::NonPositiveWidth: return "NonPositiveWidth";
        case ErrorKind::NonPositiveC: return "NonPositiveC";
        case ErrorKind::UnsupportedForPrecomputed: return "UnsupportedForPrecomputed";
        case ErrorKind::SingularSystem: return "SingularSystem";
        case ErrorKind::SingularB: return "SingularB";
        case ErrorKind::InsufficientRank: return "InsufficientRank";
        case ErrorKind::DegenerateM22: return "DegenerateM22";
    }
    return "Unknown";
}

constexpr ErrorCategory category_of(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::InvalidArgument:
        case ErrorKind::NonPositiveSigma:
        case ErrorKind::NonPositiveWidth:
        case ErrorKind::NonPositiveC:
        case ErrorKind::UnsupportedForPrecomputed:
            return ErrorCategory::usage;
        case ErrorKind::SingularSystem:
        case ErrorKind::SingularB:
        case ErrorKind::InsufficientRank:
        case ErrorKind::DegenerateM22:
            return ErrorCategory::numerical;
        default:
            return ErrorCategory::data;
    }
}

/// Exception carrying a machine-checkable kind; what() is "<Kind>: <detail>".
class Error : public std::runtime_error {
  public:
    Error(ErrorKind kind, const std::string &detail)
        : std::runtime_error(std::string(to_string(kind)) + ": " + detail), kind_(kind), detail_(detail) {}

    [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }
    [[nodiscard]] const std::string &detail() const noexcept { return detail_; }
    [[nodiscard]] ErrorCategory category() const noexcept { return category_of(kind_); }

  private:
    ErrorKind kind_;
    std::string detail_;
};

}  // namespace pual

#endif  // PUAL_ERROR_HPP
