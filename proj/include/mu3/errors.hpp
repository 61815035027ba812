#pragma once

#include <stdexcept>
#include <string>

namespace mu3 {

/// Error classes map one-to-one onto CLI exit codes.
enum class ErrorClass { Geometry = 2, Numerics = 3, Io = 4 };

class Error : public std::runtime_error {
 public:
  Error(ErrorClass cls, std::string kind, const std::string& what)
      : std::runtime_error(kind + ": " + what), cls_(cls), kind_(std::move(kind)) {}

  ErrorClass error_class() const noexcept { return cls_; }
  int exit_code() const noexcept { return static_cast<int>(cls_); }
  /// Short error name, e.g. "NotExact".
  const std::string& kind() const noexcept { return kind_; }

 private:
  ErrorClass cls_;
  std::string kind_;
};

#define MU3_DEFINE_ERROR(Name, Class)                                   \
  class Name : public Error {                                          \
   public:                                                             \
    explicit Name(const std::string& what) : Error(Class, #Name, what) {} \
  };

// geometry
MU3_DEFINE_ERROR(PoleSingularity, ErrorClass::Geometry)
MU3_DEFINE_ERROR(ComponentsIntersect, ErrorClass::Geometry)
MU3_DEFINE_ERROR(UnresolvablePole, ErrorClass::Geometry)
MU3_DEFINE_ERROR(UnknownLink, ErrorClass::Geometry)
MU3_DEFINE_ERROR(TubesOverlap, ErrorClass::Geometry)
MU3_DEFINE_ERROR(EmbeddingFailed, ErrorClass::Geometry)
MU3_DEFINE_ERROR(ClosureFailed, ErrorClass::Geometry)

// numerics
MU3_DEFINE_ERROR(UndersampledField, ErrorClass::Numerics)
MU3_DEFINE_ERROR(NotExact, ErrorClass::Numerics)
MU3_DEFINE_ERROR(GridMismatch, ErrorClass::Numerics)
MU3_DEFINE_ERROR(NotRegularValue, ErrorClass::Numerics)
MU3_DEFINE_ERROR(BrokenChain, ErrorClass::Numerics)
MU3_DEFINE_ERROR(LeftTube, ErrorClass::Numerics)
MU3_DEFINE_ERROR(EstimatorUnreliable, ErrorClass::Numerics)
MU3_DEFINE_ERROR(IncompleteTable, ErrorClass::Numerics)

// i/o
MU3_DEFINE_ERROR(IoError, ErrorClass::Io)

#undef MU3_DEFINE_ERROR

}  // namespace mu3
