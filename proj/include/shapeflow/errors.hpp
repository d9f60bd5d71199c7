#pragma once

#include <stdexcept>
#include <string>

namespace shapeflow {

// Error taxonomy mirrored by the CLI exit codes:
//   invalid_input -> 2, solver_failure -> 3, io_error -> 4.
class invalid_input : public std::runtime_error {
public:
  explicit invalid_input(const std::string& msg) : std::runtime_error(msg) {}
};

// det of a deformation gradient is non-positive where a derivative was requested.
class singular_deformation : public invalid_input {
public:
  explicit singular_deformation(const std::string& msg) : invalid_input(msg) {}
};

class solver_failure : public std::runtime_error {
public:
  explicit solver_failure(const std::string& msg) : std::runtime_error(msg) {}
};

// Newton step outside the basin; callers should subdivide the variation.
class step_too_large : public solver_failure {
public:
  explicit step_too_large(const std::string& msg) : solver_failure(msg) {}
};

class io_error : public std::runtime_error {
public:
  explicit io_error(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace shapeflow
