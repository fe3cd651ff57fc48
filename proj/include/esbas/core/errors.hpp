#pragma once

#include <stdexcept>
#include <string>

namespace esbas {

// Invalid parameters or experiment configuration.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Malformed or non-finite data fed to a learner or a bandit.
class DataError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Unknown identifier (algorithm id, preset name, ...).
class LookupError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

// An environment failed while generating an episode.
class EnvironmentError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace esbas
