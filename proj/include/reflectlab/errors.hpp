#pragma once

#include <stdexcept>
#include <string>

namespace reflectlab {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define REFLECTLAB_ERROR(Name)                 \
  class Name : public Error {                  \
   public:                                     \
    explicit Name(const std::string& what)     \
        : Error(#Name ": " + what) {}          \
  }

REFLECTLAB_ERROR(DomainError);
REFLECTLAB_ERROR(PoleError);
REFLECTLAB_ERROR(ChartError);
REFLECTLAB_ERROR(SingularityError);
REFLECTLAB_ERROR(RadicalError);
REFLECTLAB_ERROR(InvarianceError);
REFLECTLAB_ERROR(ConvergenceError);
REFLECTLAB_ERROR(PartitionError);
REFLECTLAB_ERROR(GridError);
REFLECTLAB_ERROR(HypothesisError);
REFLECTLAB_ERROR(SupportError);
REFLECTLAB_ERROR(StiffnessError);
REFLECTLAB_ERROR(ConfigError);
REFLECTLAB_ERROR(ScenarioError);
REFLECTLAB_ERROR(IoError);

#undef REFLECTLAB_ERROR

}  // namespace reflectlab
