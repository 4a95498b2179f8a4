#ifndef FOPFORGE_ERRORS_HPP
#define FOPFORGE_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace fopforge {

// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Bad argument values: element out of universe, rank out of range, ...
struct DomainError : Error {
    using Error::Error;
};

// Formula text did not conform to the grammar, or referenced unknown
// relations / wrong arities.
struct ParseError : Error {
    ParseError(const std::string& msg, std::size_t position)
        : Error(msg + " (at offset " + std::to_string(position) + ")"), pos(position) {}
    std::size_t pos;
};

// A formula was evaluated outside its contract (unbound variable, missing
// relation interpretation).
struct EvalError : Error {
    using Error::Error;
};

// Structure/reduction vocabularies do not line up.
struct VocabularyError : Error {
    using Error::Error;
};

// A reduction definition is malformed (constant formula with zero or
// multiple solutions, unsupported shape, size below the definition's
// minimum).
struct DefinitionError : Error {
    using Error::Error;
};

// A formula does not have the guarded-disjunction shape of a projection.
struct NotProjectiveError : Error {
    NotProjectiveError(const std::string& reason, std::string offending_subformula)
        : Error(reason + ": " + offending_subformula), subformula(std::move(offending_subformula)) {}
    std::string subformula;
};

// An enumeration exceeded its configured budget.
struct BudgetError : Error {
    using Error::Error;
};

// Witness transport got an invalid witness or produced an inconsistent one.
struct TransportError : Error {
    using Error::Error;
};

// Internal invariant broke (e.g. two mutually exclusive guards fired).
struct ConsistencyError : Error {
    using Error::Error;
};

}  // namespace fopforge

#endif
