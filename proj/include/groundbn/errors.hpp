#pragma once
// Error type shared by every groundbn module.
//
// All failures surface as groundbn::Error carrying a machine-readable code,
// so the HTTP layer can map them to structured responses without string
// matching.

#include <stdexcept>
#include <string>
#include <string_view>

namespace groundbn {

enum class ErrorCode {
    // bn engine
    CycleDetected,
    MissingTable,
    NonStochasticRow,
    InvalidNetwork,
    ImpossibleEvidence,
    StateSpaceTooLarge,
    UnknownNode,
    // discretize
    InvalidParameter,
    SupportMismatch,
    DegenerateCell,
    // grounding model
    DivisionByZeroLength,
    SingleHullUnsupported,
    GroundReactionExceedsWeight,
    ConfigurationIncomplete,
    InvalidConfiguration,
    // ingest
    InsufficientSamples,
    NonMonotoneVolumeCurve,
    NegativeReaction,
    OutOfBounds,
    MalformedInput,
    // session
    OutOfRangeValue,
    UnknownEvidenceId,
    CorruptFile,
    VersionMismatch,
    // api / cli
    FixtureMissing,
    PortInUse,
    DataDirUnwritable,
    UnknownSession,
};

inline std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::CycleDetected: return "CycleDetected";
        case ErrorCode::MissingTable: return "MissingTable";
        case ErrorCode::NonStochasticRow: return "NonStochasticRow";
        case ErrorCode::InvalidNetwork: return "InvalidNetwork";
        case ErrorCode::ImpossibleEvidence: return "ImpossibleEvidence";
        case ErrorCode::StateSpaceTooLarge: return "StateSpaceTooLarge";
        case ErrorCode::UnknownNode: return "UnknownNode";
        case ErrorCode::InvalidParameter: return "InvalidParameter";
        case ErrorCode::SupportMismatch: return "SupportMismatch";
        case ErrorCode::DegenerateCell: return "DegenerateCell";
        case ErrorCode::DivisionByZeroLength: return "DivisionByZeroLength";
        case ErrorCode::SingleHullUnsupported: return "SingleHullUnsupported";
        case ErrorCode::GroundReactionExceedsWeight: return "GroundReactionExceedsWeight";
        case ErrorCode::ConfigurationIncomplete: return "ConfigurationIncomplete";
        case ErrorCode::InvalidConfiguration: return "InvalidConfiguration";
        case ErrorCode::InsufficientSamples: return "InsufficientSamples";
        case ErrorCode::NonMonotoneVolumeCurve: return "NonMonotoneVolumeCurve";
        case ErrorCode::NegativeReaction: return "NegativeReaction";
        case ErrorCode::OutOfBounds: return "OutOfBounds";
        case ErrorCode::MalformedInput: return "MalformedInput";
        case ErrorCode::OutOfRangeValue: return "OutOfRangeValue";
        case ErrorCode::UnknownEvidenceId: return "UnknownEvidenceId";
        case ErrorCode::CorruptFile: return "CorruptFile";
        case ErrorCode::VersionMismatch: return "VersionMismatch";
        case ErrorCode::FixtureMissing: return "FixtureMissing";
        case ErrorCode::PortInUse: return "PortInUse";
        case ErrorCode::DataDirUnwritable: return "DataDirUnwritable";
        case ErrorCode::UnknownSession: return "UnknownSession";
    }
    return "Unknown";
}

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message, std::string field = {})
        : std::runtime_error(std::string(to_string(code)) + ": " + message),
          code_(code), field_(std::move(field)), detail_(message) {}

    ErrorCode code() const noexcept { return code_; }
    // Path of the offending input field, when the error came from user input.
    const std::string& field() const noexcept { return field_; }
    const std::string& detail() const noexcept { return detail_; }

private:
    ErrorCode code_;
    std::string field_;
    std::string detail_;
};

}  // namespace groundbn
