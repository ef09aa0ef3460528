#include "dtwin/error.hpp"

namespace dtwin {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
    case ErrorCode::DuplicateId: return "DuplicateId";
    case ErrorCode::MissingEndpoint: return "MissingEndpoint";
    case ErrorCode::KindViolation: return "KindViolation";
    case ErrorCode::HierarchyCycle: return "HierarchyCycle";
    case ErrorCode::InvalidNode: return "InvalidNode";
    case ErrorCode::ConflictingKind: return "ConflictingKind";
    case ErrorCode::MalformedRecord: return "MalformedRecord";
    case ErrorCode::XmlSyntax: return "XmlSyntax";
    case ErrorCode::SchemaViolation: return "SchemaViolation";
    case ErrorCode::UnresolvedReference: return "UnresolvedReference";
    case ErrorCode::RecursiveCall: return "RecursiveCall";
    case ErrorCode::MalformedRow: return "MalformedRow";
    case ErrorCode::EmptySeries: return "EmptySeries";
    case ErrorCode::BandTooNarrow: return "BandTooNarrow";
    case ErrorCode::EmptyTrainingSet: return "EmptyTrainingSet";
    case ErrorCode::InsufficientData: return "InsufficientData";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::StaleEmbedding: return "StaleEmbedding";
    case ErrorCode::InvalidGraph: return "InvalidGraph";
    case ErrorCode::UnknownRole: return "UnknownRole";
    case ErrorCode::DanglingLink: return "DanglingLink";
    case ErrorCode::InvalidSpec: return "InvalidSpec";
    case ErrorCode::UniverseMismatch: return "UniverseMismatch";
    case ErrorCode::Io: return "Io";
    case ErrorCode::Config: return "Config";
    case ErrorCode::Internal: return "Internal";
    }
    return "Unknown";
}

}  // namespace dtwin
