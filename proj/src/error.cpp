#include "hsa/error.hpp"

namespace hsa {

const char* errc_name(Errc c) {
    switch (c) {
    case Errc::NonPrimeModulus: return "NonPrimeModulus";
    case Errc::DivisionByZero: return "DivisionByZero";
    case Errc::DenominatorVanishes: return "DenominatorVanishes";
    case Errc::FieldMismatch: return "FieldMismatch";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::IndexOutOfRange: return "IndexOutOfRange";
    case Errc::Singular: return "Singular";
    case Errc::Inconsistent: return "Inconsistent";
    case Errc::AttemptsExhausted: return "AttemptsExhausted";
    case Errc::EmptyUserAssignment: return "EmptyUserAssignment";
    case Errc::OrphanDataset: return "OrphanDataset";
    case Errc::TooManyStragglers: return "TooManyStragglers";
    case Errc::TooManyColluders: return "TooManyColluders";
    case Errc::ReplicationTooHigh: return "ReplicationTooHigh";
    case Errc::NonIntegralKeyCount: return "NonIntegralKeyCount";
    case Errc::InfeasibleColumn: return "InfeasibleColumn";
    case Errc::ConstructionFailed: return "ConstructionFailed";
    case Errc::SecurityConstraintViolated: return "SecurityConstraintViolated";
    case Errc::EncodabilityViolation: return "EncodabilityViolation";
    case Errc::TooFewSurvivors: return "TooFewSurvivors";
    case Errc::NoInvertibleSubset: return "NoInvertibleSubset";
    case Errc::MissingRelayMessage: return "MissingRelayMessage";
    case Errc::DecodeMismatch: return "DecodeMismatch";
    case Errc::BudgetExceeded: return "BudgetExceeded";
    case Errc::ParseError: return "ParseError";
    case Errc::IoError: return "IoError";
    }
    return "UnknownError";
}

} // namespace hsa
