#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace dtwin {

enum class ErrorCode {
    // graph-core
    DuplicateId,
    MissingEndpoint,
    KindViolation,
    HierarchyCycle,
    InvalidNode,
    ConflictingKind,
    MalformedRecord,
    // plc-ingest
    XmlSyntax,
    SchemaViolation,
    UnresolvedReference,
    RecursiveCall,
    // dynamics-analysis
    MalformedRow,
    EmptySeries,
    BandTooNarrow,
    EmptyTrainingSet,
    InsufficientData,
    // pattern-mining
    InvalidArgument,
    StaleEmbedding,
    // aml-io
    InvalidGraph,
    UnknownRole,
    DanglingLink,
    // synthplant
    InvalidSpec,
    UniverseMismatch,
    // shared
    Io,
    Config,
    Internal,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every failure raised by the library carries a machine-readable code.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
    throw Error(code, message);
}

}  // namespace dtwin
