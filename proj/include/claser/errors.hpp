// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace claser {

// Base class for all library errors.
class error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad user input: malformed files, out-of-range arguments, unknown names.
class input_error : public error {
 public:
  using error::error;
};

// Filesystem failures: unreadable or unwritable paths.
class io_error : public error {
 public:
  using error::error;
};

// An evaluator was asked for something it cannot provide (e.g. gradients).
class capability_error : public error {
 public:
  using error::error;
};

// A checked runtime property did not hold (e.g. no improvement in the demo).
class property_error : public error {
 public:
  using error::error;
};

// Numerical failure (e.g. SVD non-convergence, non-finite inputs).
class numeric_error : public error {
 public:
  using error::error;
};

}  // namespace claser
