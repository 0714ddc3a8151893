#pragma once

#include <stdexcept>
#include <string>

namespace switchcert {

/// Library-wide error with a machine-readable code.
class Error : public std::runtime_error {
 public:
  enum class Code {
    DimensionMismatch,
    OddDegree,
    NotSymmetric,
    NonzeroConstantTerm,
    DegreeCapTooSmall,
    NoFeasibleBeta,
    LinearizationNotCertifiedStable,
    EnumerationCapExceeded,
    IllConditioned,
    MalformedInput,
    Internal,
  };

  Error(Code code, const std::string& what) : std::runtime_error(what), code_(code) {}

  Code code() const { return code_; }

  const char* code_name() const {
    switch (code_) {
      case Code::DimensionMismatch: return "DimensionMismatch";
      case Code::OddDegree: return "OddDegree";
      case Code::NotSymmetric: return "NotSymmetric";
      case Code::NonzeroConstantTerm: return "NonzeroConstantTerm";
      case Code::DegreeCapTooSmall: return "DegreeCapTooSmall";
      case Code::NoFeasibleBeta: return "NoFeasibleBeta";
      case Code::LinearizationNotCertifiedStable: return "LinearizationNotCertifiedStable";
      case Code::EnumerationCapExceeded: return "EnumerationCapExceeded";
      case Code::IllConditioned: return "IllConditioned";
      case Code::MalformedInput: return "MalformedInput";
      case Code::Internal: return "Internal";
    }
    return "Unknown";
  }

 private:
  Code code_;
};

inline void require(bool condition, Error::Code code, const std::string& what) {
  if (!condition) throw Error(code, what);
}

}  // namespace switchcert
