#ifndef NSAQA_CORE_ERRORS_HPP
#define NSAQA_CORE_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace nsaqa {

// Every failure the engine can produce, grouped so the C API can map them
// onto its three exit classes (input / analysis / internal).
enum class ErrorKind {
    // input-side: the caller gave us something malformed
    MalformedDocument,
    SchemaViolation,
    InvariantViolation,
    EmptyCorpus,
    InfeasibleScript,
    UnknownConfigKey,
    MissingPlaceholder,
    UnknownPlaceholder,
    UnknownAspect,
    // analysis-side: valid data, but the rules cannot produce a result
    ZeroVector,
    DegenerateJoint,
    AliasingSuspected,
    NoUsablePose,
    NeverLeavesPlatform,
    NoEntryDetected,
    AmbiguousFacing,
    PhaseAbsent,
    NoApplicableAspects,
    AllZeroWeights,
    InconsistentInputs,
    // anything else
    Internal,
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    ErrorKind kind() const { return kind_; }

    static bool is_input_kind(ErrorKind k) {
        switch (k) {
            case ErrorKind::MalformedDocument:
            case ErrorKind::SchemaViolation:
            case ErrorKind::InvariantViolation:
            case ErrorKind::EmptyCorpus:
            case ErrorKind::InfeasibleScript:
            case ErrorKind::UnknownConfigKey:
            case ErrorKind::MissingPlaceholder:
            case ErrorKind::UnknownPlaceholder:
            case ErrorKind::UnknownAspect:
                return true;
            default:
                return false;
        }
    }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void raise(ErrorKind kind, const std::string& message) {
    throw Error(kind, message);
}

} // namespace nsaqa

#endif
