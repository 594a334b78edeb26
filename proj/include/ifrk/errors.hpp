#pragma once

#include <stdexcept>
#include <string>

namespace ifrk {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid grid, scheme, term parameters or run configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A field was handed to an operator built on a different grid.
class GridMismatch : public Error {
 public:
  using Error::Error;
};

/// A stepper with MBP enforcement refused to take a step.
class StepRefused : public Error {
 public:
  using Error::Error;
};

}  // namespace ifrk
