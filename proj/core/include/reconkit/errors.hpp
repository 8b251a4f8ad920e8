#pragma once

#include <stdexcept>
#include <string>

namespace reconkit {

enum class Errc {
  NotInBasis,
  InvalidArgument,
  ResourceLimit,
  DivergentSum,
  InsufficientData,
  UndefinedCharacter,
  ParseError,
  IoError,
};

inline const char* errc_name(Errc c) {
  switch (c) {
    case Errc::NotInBasis: return "not-in-basis";
    case Errc::InvalidArgument: return "invalid-argument";
    case Errc::ResourceLimit: return "resource-limit";
    case Errc::DivergentSum: return "divergent-sum";
    case Errc::InsufficientData: return "insufficient-data";
    case Errc::UndefinedCharacter: return "undefined-character";
    case Errc::ParseError: return "parse-error";
    case Errc::IoError: return "io-error";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(Errc kind, const std::string& what)
      : std::runtime_error(std::string(errc_name(kind)) + ": " + what), kind_(kind) {}
  Errc kind() const { return kind_; }

 private:
  Errc kind_;
};

[[noreturn]] inline void fail(Errc kind, const std::string& what) { throw Error(kind, what); }

}  // namespace reconkit
