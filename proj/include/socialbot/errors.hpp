#pragma once

#include <stdexcept>
#include <string>

namespace socialbot {

/// Caller handed us something malformed (empty n-best, bad score, ...).
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Data files, flows or registries are inconsistent. Raised at load time.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Session or store state does not permit the operation.
class StateError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace socialbot
