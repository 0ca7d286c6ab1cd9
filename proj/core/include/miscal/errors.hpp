// Exception hierarchy shared by all miscal modules.
#pragma once

#include <stdexcept>
#include <string>

namespace miscal {

/// Base class for all toolkit errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Invalid or inconsistent configuration (CLI exit code 2).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Filesystem failure, message carries the offending path (CLI exit code 3).
class IoError : public Error {
 public:
  using Error::Error;
};

/// Numerical failure that survived the retry budget (CLI exit code 4).
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Projection of a point at or behind the camera plane (z <= 0).
class NonPositiveDepth : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Scene produced too few usable correspondences.
class DegenerateScene : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Linear system with effective rank < 3 (e.g. collinear points).
class RankDeficient : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class TooFewCorrespondences : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class EmptyInput : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Fusing an empty estimate list; callers hold the previous value instead.
class NothingToFuse : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Argument outside a function's mathematical domain (log of p <= 0, b <= 0, ...).
class DomainError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace miscal
