#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace askdb {

// Base for every failure the pipeline reports to callers. kind() is the
// stable, machine-readable name used in the HTTP error body {"error","kind"}.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual std::string_view kind() const noexcept = 0;
};

#define ASKDB_DEFINE_ERROR(Name)                                         \
  class Name : public Error {                                           \
   public:                                                              \
    using Error::Error;                                                 \
    std::string_view kind() const noexcept override { return #Name; }   \
  };

// onboarding
ASKDB_DEFINE_ERROR(OnboardingError)
ASKDB_DEFINE_ERROR(AmbiguityError)

// translator
ASKDB_DEFINE_ERROR(BackendUnavailable)
ASKDB_DEFINE_ERROR(NoTranslation)

// sql_parser
ASKDB_DEFINE_ERROR(UnterminatedLiteral)
ASKDB_DEFINE_ERROR(UnsupportedSyntax)
ASKDB_DEFINE_ERROR(UnknownIdentifier)

// viz_ranker
ASKDB_DEFINE_ERROR(NoCandidates)
ASKDB_DEFINE_ERROR(CycleDetected)
ASKDB_DEFINE_ERROR(DegenerateInput)

// executor
ASKDB_DEFINE_ERROR(RejectedStatement)
ASKDB_DEFINE_ERROR(ExecutionError)

// service
ASKDB_DEFINE_ERROR(UnknownDatabase)
ASKDB_DEFINE_ERROR(NotFound)
ASKDB_DEFINE_ERROR(InvalidRequest)
ASKDB_DEFINE_ERROR(MalformedInput)

#undef ASKDB_DEFINE_ERROR

class FormatMismatch : public Error {
 public:
  FormatMismatch(std::size_t row, const std::string& what)
      : Error(what), row_(row) {}
  std::string_view kind() const noexcept override { return "FormatMismatch"; }
  std::size_t row() const noexcept { return row_; }

 private:
  std::size_t row_;
};

}  // namespace askdb
