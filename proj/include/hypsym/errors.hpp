#pragma once

#include <stdexcept>
#include <string>

namespace hypsym {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define HYPSYM_DEFINE_ERROR(Name)          \
  class Name : public Error {              \
   public:                                 \
    using Error::Error;                    \
  }

HYPSYM_DEFINE_ERROR(DomainError);
HYPSYM_DEFINE_ERROR(RangeError);
HYPSYM_DEFINE_ERROR(ResolutionError);
HYPSYM_DEFINE_ERROR(NotHyperbolicError);
HYPSYM_DEFINE_ERROR(MultiplicityError);
HYPSYM_DEFINE_ERROR(IllConditionedError);
HYPSYM_DEFINE_ERROR(EpsilonTooLargeError);
HYPSYM_DEFINE_ERROR(ConvergenceError);
HYPSYM_DEFINE_ERROR(NearDegenerateError);
HYPSYM_DEFINE_ERROR(BelowR0Error);
HYPSYM_DEFINE_ERROR(FitError);
HYPSYM_DEFINE_ERROR(ConfigError);

#undef HYPSYM_DEFINE_ERROR

}  // namespace hypsym
