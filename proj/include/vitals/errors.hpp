#pragma once

#include <stdexcept>
#include <string>

namespace vitals {

/// A precondition on a computation was violated (bad month range, e < 1, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Input data could not be read or parsed.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Month range with from > to.
class InvalidRangeError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Transport-level failure talking to a forge, after retries were exhausted.
class NetworkError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class AuthError : public NetworkError {
 public:
  using NetworkError::NetworkError;
};

class RateLimitError : public NetworkError {
 public:
  using NetworkError::NetworkError;
};

/// The report was requested but the chart script is not available.
class ChartAssetMissing : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace vitals
