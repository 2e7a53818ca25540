#pragma once

#include <stdexcept>
#include <string>

namespace alm {

struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct LedgerError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RuleViolation : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ParityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace alm
