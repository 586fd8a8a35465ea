#pragma once

#include <stdexcept>
#include <string>

namespace psg {

enum class ErrorCode {
    Validation,
    NonConvergence,
    NotExpanding,
    Overflow,
    BudgetExceeded,
    NoSignChange,
    NoRepellingFixedPoint,
    BranchCollision,
    NewtonDivergence,
    Inconclusive,
    DegenerateCloud,
    BadVertices,
    BadModulus,
    PredicateNonMonotone,
};

inline const char* error_code_name(ErrorCode c) {
    switch (c) {
        case ErrorCode::Validation: return "Validation";
        case ErrorCode::NonConvergence: return "NonConvergence";
        case ErrorCode::NotExpanding: return "NotExpanding";
        case ErrorCode::Overflow: return "Overflow";
        case ErrorCode::BudgetExceeded: return "BudgetExceeded";
        case ErrorCode::NoSignChange: return "NoSignChange";
        case ErrorCode::NoRepellingFixedPoint: return "NoRepellingFixedPoint";
        case ErrorCode::BranchCollision: return "BranchCollision";
        case ErrorCode::NewtonDivergence: return "NewtonDivergence";
        case ErrorCode::Inconclusive: return "Inconclusive";
        case ErrorCode::DegenerateCloud: return "DegenerateCloud";
        case ErrorCode::BadVertices: return "BadVertices";
        case ErrorCode::BadModulus: return "BadModulus";
        case ErrorCode::PredicateNonMonotone: return "PredicateNonMonotone";
    }
    return "Unknown";
}

class Error : public std::runtime_error {
  public:
    Error(ErrorCode code, const std::string& detail)
        : std::runtime_error(std::string(error_code_name(code)) + ": " + detail), code_(code), detail_(detail) {}

    ErrorCode code() const { return code_; }
    const std::string& detail() const { return detail_; }

  private:
    ErrorCode code_;
    std::string detail_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& detail) {
    throw Error(code, detail);
}

}  // namespace psg
