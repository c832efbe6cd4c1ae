#pragma once

#include <stdexcept>
#include <string>

namespace crsm {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Carrier larger than kMaxCarrierSize, or an operation that needs a
/// smaller carrier (exact vertex enumeration, subset-form oracles).
class SizeCapError : public Error {
 public:
  using Error::Error;
};

/// Two objects that must live on the same carrier do not.
class CarrierMismatch : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Raised by operations whose contract requires a completely alternating
/// capacity (greedy duality, CRSM simulation).
class NotCompletelyAlternating : public Error {
 public:
  using Error::Error;
};

/// LePage series did not reach the exact stopping condition within the
/// configured term budget.
class MaxTermsExceeded : public Error {
 public:
  using Error::Error;
};

/// Malformed JSON input. `path()` is a JSON-pointer-like location.
class JsonError : public Error {
 public:
  JsonError(std::string path, const std::string& what)
      : Error(path.empty() ? what : path + ": " + what), path_(std::move(path)) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

}  // namespace crsm
