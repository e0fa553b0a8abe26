#pragma once

#include <stdexcept>
#include <string>

namespace couette {

// Exit-code family of an error, used by the CLI.
enum class ErrorKind { Config, Numerical };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& name, const std::string& what);
  ErrorKind kind() const noexcept { return kind_; }
  const std::string& name() const noexcept { return name_; }

 private:
  ErrorKind kind_;
  std::string name_;
};

#define COUETTE_DECLARE_ERROR(Name, Kind)                                  \
  class Name : public Error {                                             \
   public:                                                                \
    explicit Name(const std::string& what) : Error(Kind, #Name, what) {}  \
  };

COUETTE_DECLARE_ERROR(ConfigInvalid, ErrorKind::Config)
COUETTE_DECLARE_ERROR(NonconformalGrid, ErrorKind::Config)
COUETTE_DECLARE_ERROR(InvalidRichardson, ErrorKind::Config)
COUETTE_DECLARE_ERROR(DegenerateDirection, ErrorKind::Config)
COUETTE_DECLARE_ERROR(GridTooLarge, ErrorKind::Config)
COUETTE_DECLARE_ERROR(SingularSymbolAtZeroMode, ErrorKind::Numerical)
COUETTE_DECLARE_ERROR(TruncationBudgetExceeded, ErrorKind::Numerical)
COUETTE_DECLARE_ERROR(CflViolation, ErrorKind::Numerical)
COUETTE_DECLARE_ERROR(NonfiniteState, ErrorKind::Numerical)
COUETTE_DECLARE_ERROR(TimeMismatch, ErrorKind::Numerical)
COUETTE_DECLARE_ERROR(InsufficientData, ErrorKind::Numerical)
COUETTE_DECLARE_ERROR(NonpositiveNorm, ErrorKind::Numerical)
COUETTE_DECLARE_ERROR(BracketFailure, ErrorKind::Numerical)

#undef COUETTE_DECLARE_ERROR

}  // namespace couette
