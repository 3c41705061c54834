#pragma once

#include <stdexcept>
#include <string>

namespace defk {

// Stable error codes; the CLI prints the enumerator name verbatim.
enum class Err {
  EmptySet,
  Singular,
  UnsupportedRing,
  UnsupportedDecomposition,
  PreconditionFailed,
  InvalidMap,
  DescriptorMismatch,
  ParseError,
  SizeBound,
};

inline const char* err_name(Err e) {
  switch (e) {
    case Err::EmptySet: return "EmptySet";
    case Err::Singular: return "Singular";
    case Err::UnsupportedRing: return "UnsupportedRing";
    case Err::UnsupportedDecomposition: return "UnsupportedDecomposition";
    case Err::PreconditionFailed: return "PreconditionFailed";
    case Err::InvalidMap: return "InvalidMap";
    case Err::DescriptorMismatch: return "DescriptorMismatch";
    case Err::ParseError: return "ParseError";
    case Err::SizeBound: return "SizeBound";
  }
  return "?";
}

class EngineError : public std::runtime_error {
 public:
  EngineError(Err code, const std::string& msg)
      : std::runtime_error(std::string(err_name(code)) + ": " + msg), code_(code) {}
  Err code() const { return code_; }

 private:
  Err code_;
};

[[noreturn]] inline void fail(Err code, const std::string& msg) { throw EngineError(code, msg); }

// Internal consistency check; a violation is a bug, not a domain error.
inline void require(bool ok, const char* what) {
  if (!ok) throw std::logic_error(std::string("internal invariant violated: ") + what);
}

}  // namespace defk
