#pragma once

#include <stdexcept>
#include <string>

namespace qa {

// Base of every library error. Each subclass corresponds to one failure mode
// that callers (and the CLI) may want to distinguish.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define QA_DECLARE_ERROR(Name)          \
  class Name : public Error {           \
   public:                              \
    using Error::Error;                 \
  }

QA_DECLARE_ERROR(NotHermitian);
QA_DECLARE_ERROR(DecompositionFailure);
QA_DECLARE_ERROR(DomainViolation);
QA_DECLARE_ERROR(DimensionMismatch);
QA_DECLARE_ERROR(DimensionCap);
QA_DECLARE_ERROR(StepFailure);
QA_DECLARE_ERROR(QuadratureBudgetExceeded);
QA_DECLARE_ERROR(DivergenceWarning);
QA_DECLARE_ERROR(NotConserved);
QA_DECLARE_ERROR(NotOrthogonal);
QA_DECLARE_ERROR(FitFailure);
QA_DECLARE_ERROR(LogFailure);
QA_DECLARE_ERROR(KernelSingularity);
QA_DECLARE_ERROR(FormatError);
QA_DECLARE_ERROR(ConfigError);
QA_DECLARE_ERROR(TaskError);

#undef QA_DECLARE_ERROR

}  // namespace qa
