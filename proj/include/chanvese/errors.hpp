#pragma once

#include <stdexcept>
#include <string>

namespace chanvese {

/// Invalid model, scheme or initialization parameter.
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Two fields that must share a grid do not.
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A scheme produced a non-finite value.
class NumericalError : public std::runtime_error {
 public:
  NumericalError(const std::string& what, int row, int col, int iteration = -1)
      : std::runtime_error(what), row_(row), col_(col), iteration_(iteration) {}

  int row() const noexcept { return row_; }
  int col() const noexcept { return col_; }
  /// Outer iteration index, or -1 when raised outside the segmentation loop.
  int iteration() const noexcept { return iteration_; }

 private:
  int row_;
  int col_;
  int iteration_;
};

/// Unreadable or undecodable input image.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Artifact could not be written.
class OutputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace chanvese
