#pragma once

#include <stdexcept>
#include <string>

namespace pestbench {

// Root of every error this library throws on purpose. Anything else
// escaping the public surface is a bug.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& message) : std::runtime_error(message) {}
};

// Configuration and input files.
class ConfigError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class SchemaError : public Error {
 public:
  using Error::Error;
};

// Knowledge base.
class MalformedFileError : public Error {
 public:
  using Error::Error;
};

class EmptyIntersectionError : public Error {
 public:
  using Error::Error;
};

class DuplicatePestError : public Error {
 public:
  using Error::Error;
};

class UnknownPestError : public Error {
 public:
  using Error::Error;
};

class UnparsableDensityError : public Error {
 public:
  using Error::Error;
};

// Scenario generation.
class NoUnaffectedCropsError : public Error {
 public:
  using Error::Error;
};

// Prompt building.
class InsufficientExemplarsError : public Error {
 public:
  using Error::Error;
};

// Model gateway.
class AuthError : public Error {
 public:
  using Error::Error;
};

class RateLimitedError : public Error {
 public:
  using Error::Error;
};

class ProviderError : public Error {
 public:
  using Error::Error;
};

class CacheMissError : public Error {
 public:
  using Error::Error;
};

class RequestBudgetError : public Error {
 public:
  using Error::Error;
};

// Judge output parsing.
class UnparsableVerdictError : public Error {
 public:
  using Error::Error;
};

class MissingDimensionError : public Error {
 public:
  using Error::Error;
};

class OutOfRangeScoreError : public Error {
 public:
  using Error::Error;
};

class DuplicateDimensionError : public Error {
 public:
  using Error::Error;
};

class JudgeFailedError : public Error {
 public:
  using Error::Error;
};

// Metrics.
class LengthMismatchError : public Error {
 public:
  using Error::Error;
};

class EmptyCellError : public Error {
 public:
  using Error::Error;
};

class WeightSumInvalidError : public Error {
 public:
  using Error::Error;
};

// Reporting.
class MissingMetricsError : public Error {
 public:
  using Error::Error;
};

}  // namespace pestbench
