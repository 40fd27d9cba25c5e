#pragma once

#include <stdexcept>
#include <string>

namespace motkit {

// Error hierarchy shared by every module. All of these derive from
// std::runtime_error so callers can catch coarsely; workflows map them to
// process exit codes at the CLI boundary.

/// A covariance input failed the symmetry check or could not be factored
/// even after jitter retries.
class NotPsdError : public std::runtime_error {
 public:
  explicit NotPsdError(const std::string& what) : std::runtime_error(what) {}
};

/// Innovation covariance is singular or too ill-conditioned to invert.
class SingularInnovationError : public std::runtime_error {
 public:
  explicit SingularInnovationError(const std::string& what)
      : std::runtime_error(what) {}
};

/// A linear-only operation was handed a model without the matrix form.
class MissingLinearFormError : public std::runtime_error {
 public:
  explicit MissingLinearFormError(const std::string& what)
      : std::runtime_error(what) {}
};

/// Vector or matrix sizes do not agree with the declared layout.
class DimensionMismatchError : public std::runtime_error {
 public:
  explicit DimensionMismatchError(const std::string& what)
      : std::runtime_error(what) {}
};

/// A pixel-window access would leave the frame bounds.
class OutOfBoundsError : public std::runtime_error {
 public:
  explicit OutOfBoundsError(const std::string& what)
      : std::runtime_error(what) {}
};

/// Tracker initialization received no detections to seed from.
class EmptyDetectionsError : public std::runtime_error {
 public:
  explicit EmptyDetectionsError(const std::string& what)
      : std::runtime_error(what) {}
};

/// Paired sequences (e.g. estimates vs. ground truth) differ in length.
class LengthMismatchError : public std::runtime_error {
 public:
  explicit LengthMismatchError(const std::string& what)
      : std::runtime_error(what) {}
};

/// File could not be read/written or has a malformed format.
class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

/// Configuration value out of range, unknown key, or unparsable file.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace motkit
