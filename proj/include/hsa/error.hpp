#pragma once

#include <stdexcept>
#include <string>

namespace hsa {

/// Every failure the library can raise, one code per named condition.
/// The CLI maps these onto its exit-code contract.
enum class Errc {
    NonPrimeModulus,
    DivisionByZero,
    DenominatorVanishes,
    FieldMismatch,
    DimensionMismatch,
    IndexOutOfRange,
    Singular,
    Inconsistent,
    AttemptsExhausted,
    EmptyUserAssignment,
    OrphanDataset,
    TooManyStragglers,
    TooManyColluders,
    ReplicationTooHigh,
    NonIntegralKeyCount,
    InfeasibleColumn,
    ConstructionFailed,
    SecurityConstraintViolated,
    EncodabilityViolation,
    TooFewSurvivors,
    NoInvertibleSubset,
    MissingRelayMessage,
    DecodeMismatch,
    BudgetExceeded,
    ParseError,
    IoError,
};

const char* errc_name(Errc c);

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what)
        : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

[[noreturn]] inline void raise(Errc code, const std::string& what) { throw Error(code, what); }

} // namespace hsa
