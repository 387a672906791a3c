#pragma once

#include <stdexcept>
#include <string>

namespace opd {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

/// A policy puts mass where the reference (or anchor) policy has none.
class SupportViolation : public Error {
 public:
  using Error::Error;
};

class SchemaError : public Error {
 public:
  using Error::Error;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

class InstanceRejection : public Error {
 public:
  using Error::Error;
};

/// Slater margin is not positive, so no finite multiplier bound exists.
class InfeasibleInstance : public Error {
 public:
  using Error::Error;
};

class NoConvergence : public Error {
 public:
  using Error::Error;
};

class DegenerateFisher : public Error {
 public:
  using Error::Error;
};

class InnerLoopBudgetExceeded : public Error {
 public:
  using Error::Error;
};

}  // namespace opd
