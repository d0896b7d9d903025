#pragma once

#include <stdexcept>
#include <string>

namespace simplechar {

/// Failure classes map onto the CLI exit-code taxonomy:
/// validation (2), certification (3), solver (4), study assertion (5).
enum class ErrorClass { Validation = 2, Certification = 3, Solver = 4, Study = 5 };

struct Error : std::runtime_error {
  ErrorClass cls;
  Error(ErrorClass c, const std::string& msg) : std::runtime_error(msg), cls(c) {}
};

struct DimensionMismatch : Error {
  explicit DimensionMismatch(const std::string& m) : Error(ErrorClass::Validation, m) {}
};
struct GridMismatch : Error {
  explicit GridMismatch(const std::string& m) : Error(ErrorClass::Validation, m) {}
};
struct DegenerateLine : Error {
  explicit DegenerateLine(const std::string& m) : Error(ErrorClass::Solver, m) {}
};
struct NearDoubleRoot : Error {
  explicit NearDoubleRoot(const std::string& m) : Error(ErrorClass::Solver, m) {}
};
struct DoubleCharacteristic : Error {
  explicit DoubleCharacteristic(const std::string& m) : Error(ErrorClass::Certification, m) {}
};
struct DirectionOnCharacteristicCone : Error {
  explicit DirectionOnCharacteristicCone(const std::string& m) : Error(ErrorClass::Certification, m) {}
};
struct BudgetExhausted : Error {
  explicit BudgetExhausted(const std::string& m) : Error(ErrorClass::Certification, m) {}
};
struct UncertifiedDirections : Error {
  explicit UncertifiedDirections(const std::string& m) : Error(ErrorClass::Certification, m) {}
};
struct BadSetLeakage : Error {
  explicit BadSetLeakage(const std::string& m) : Error(ErrorClass::Solver, m) {}
};
struct DivisionOnZeroSet : Error {
  explicit DivisionOnZeroSet(const std::string& m) : Error(ErrorClass::Solver, m) {}
};
struct NotNormal : Error {
  explicit NotNormal(const std::string& m) : Error(ErrorClass::Solver, m) {}
};
struct NearParallel : Error {
  explicit NearParallel(const std::string& m) : Error(ErrorClass::Validation, m) {}
};
struct ConfigError : Error {
  explicit ConfigError(const std::string& m) : Error(ErrorClass::Validation, m) {}
};

}  // namespace simplechar
