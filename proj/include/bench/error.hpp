#ifndef BENCH_ERROR_HPP
#define BENCH_ERROR_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace bench {

enum class Errc {
    MissingTarget,
    NonRectangular,
    EmptyDataset,
    DegenerateSplit,
    DigestMismatch,
    CorruptCheckpoint,
    ConfigDigestMismatch,
    UnknownStrategyId,
    SingleClassTraining,
    DimensionMismatch,
    TooFewSamples,
    InvalidHyperparameter,
    LengthMismatch,
    InvalidAlpha,
    InvalidLabels,
    MissingPair,
    TooFewPoints,
    TooFewDatasets,
    EmptyInput,
    MissingEntry,
    UnsupportedK,
    UnsupportedAlpha,
    DomainError,
    InsufficientOverlap,
    IoError,
    ParseError,
};

constexpr std::string_view errc_name(Errc e) noexcept {
    switch (e) {
    case Errc::MissingTarget: return "MissingTarget";
    case Errc::NonRectangular: return "NonRectangular";
    case Errc::EmptyDataset: return "EmptyDataset";
    case Errc::DegenerateSplit: return "DegenerateSplit";
    case Errc::DigestMismatch: return "DigestMismatch";
    case Errc::CorruptCheckpoint: return "CorruptCheckpoint";
    case Errc::ConfigDigestMismatch: return "ConfigDigestMismatch";
    case Errc::UnknownStrategyId: return "UnknownStrategyId";
    case Errc::SingleClassTraining: return "SingleClassTraining";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::TooFewSamples: return "TooFewSamples";
    case Errc::InvalidHyperparameter: return "InvalidHyperparameter";
    case Errc::LengthMismatch: return "LengthMismatch";
    case Errc::InvalidAlpha: return "InvalidAlpha";
    case Errc::InvalidLabels: return "InvalidLabels";
    case Errc::MissingPair: return "MissingPair";
    case Errc::TooFewPoints: return "TooFewPoints";
    case Errc::TooFewDatasets: return "TooFewDatasets";
    case Errc::EmptyInput: return "EmptyInput";
    case Errc::MissingEntry: return "MissingEntry";
    case Errc::UnsupportedK: return "UnsupportedK";
    case Errc::UnsupportedAlpha: return "UnsupportedAlpha";
    case Errc::DomainError: return "DomainError";
    case Errc::InsufficientOverlap: return "InsufficientOverlap";
    case Errc::IoError: return "IoError";
    case Errc::ParseError: return "ParseError";
    }
    return "Unknown";
}

/// Exception carrying a machine-checkable error kind; what() is "<Kind>: <detail>".
class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& detail)
        : std::runtime_error(std::string(errc_name(code)) + ": " + detail), code_(code) {}

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

} // namespace bench

#endif // BENCH_ERROR_HPP
