#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace genraven {

/// Root of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input array has the wrong number of entries.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Malformed dataset, manifest, or report file. Carries the byte offset when known.
class FormatError : public Error {
 public:
  explicit FormatError(const std::string& what, std::int64_t offset = -1)
      : Error(offset >= 0 ? what + " (at byte offset " + std::to_string(offset) + ")" : what),
        offset_(offset) {}

  std::int64_t offset() const noexcept { return offset_; }

 private:
  std::int64_t offset_;
};

class VersionError : public FormatError {
 public:
  using FormatError::FormatError;
};

/// Manifest inventory digest does not match its rule listing.
class IntegrityError : public FormatError {
 public:
  using FormatError::FormatError;
};

/// A relation has no satisfying tuple in the requested domain.
class InfeasibleError : public Error {
 public:
  using Error::Error;
};

/// Rejection budget exhausted while generating a row.
class GenerationFailure : public Error {
 public:
  using Error::Error;
};

/// Completion context contains structurally invalid panels.
class InvalidContext : public Error {
 public:
  using Error::Error;
};

/// Rows 1 and 2 share no rule.
class NoSharedRule : public Error {
 public:
  using Error::Error;
};

/// Rows 1 and 2 share rules, but none can be completed from the row-3 prefix.
class AllInfeasible : public Error {
 public:
  using Error::Error;
};

/// A completion test case itself is malformed or unlabeled.
class TestCaseError : public Error {
 public:
  using Error::Error;
};

/// Parallel inputs (tests vs. completions) are not aligned.
class AlignmentError : public Error {
 public:
  using Error::Error;
};

}  // namespace genraven
