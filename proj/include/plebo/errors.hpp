#pragma once

#include <stdexcept>
#include <string>

namespace plebo {

// Base for all library errors. Specific types below map one-to-one onto the
// failure modes of the operations that raise them.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define PLEBO_DEFINE_ERROR(Name)          \
  class Name : public Error {             \
   public:                                \
    using Error::Error;                   \
  }

PLEBO_DEFINE_ERROR(NotPositiveDefinite);
PLEBO_DEFINE_ERROR(DimensionMismatch);
PLEBO_DEFINE_ERROR(LikelihoodUndefined);
PLEBO_DEFINE_ERROR(FitFailed);
PLEBO_DEFINE_ERROR(InferenceFailed);
PLEBO_DEFINE_ERROR(AllWeightsZero);
PLEBO_DEFINE_ERROR(DomainError);
PLEBO_DEFINE_ERROR(ConfigError);
PLEBO_DEFINE_ERROR(NoUnobservedPoints);
PLEBO_DEFINE_ERROR(ParseError);
PLEBO_DEFINE_ERROR(EmptyTask);
PLEBO_DEFINE_ERROR(DegenerateTask);
PLEBO_DEFINE_ERROR(MetricUndefined);
PLEBO_DEFINE_ERROR(LengthMismatch);
PLEBO_DEFINE_ERROR(TaskSetMismatch);

#undef PLEBO_DEFINE_ERROR

}  // namespace plebo
