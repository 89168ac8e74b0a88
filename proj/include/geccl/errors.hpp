#pragma once

#include <stdexcept>
#include <string>

namespace geccl {

// Base class for every error the toolkit throws on purpose.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Malformed input data (parallel TSV, M2 blocks, JSON artifacts).
class ParseError : public Error {
public:
  using Error::Error;
};

// Bad configuration: prompt templates, run configs, CLI arguments.
class ConfigError : public Error {
public:
  using Error::Error;
};

// Cross-artifact consistency or precondition failure.
class ValidationError : public Error {
public:
  using Error::Error;
};

// A scoring backend failed (after retries). Carries the example id when known.
class BackendError : public Error {
public:
  explicit BackendError(const std::string& what, int example_id = -1)
      : Error(what), example_id_(example_id) {}
  int example_id() const noexcept { return example_id_; }

private:
  int example_id_;
};

// A backend response contained no usable score in [1, 10].
class UnscorableResponse : public Error {
public:
  using Error::Error;
};

}  // namespace geccl
