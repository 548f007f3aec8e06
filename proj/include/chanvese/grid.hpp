#pragma once

// Uniform 2-D grids with replicate-clamped boundary access and the one-sided
// and central finite differences used by every scheme in the library.
//
// Storage is row-major. Row index i runs along y, column index j along x, so
// the x-neighbours of (i, j) are (i, j - 1) and (i, j + 1).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "chanvese/errors.hpp"

namespace chanvese {

inline constexpr int kMinGridExtent = 3;

template <typename T>
class Field {
 public:
  using value_type = T;

  Field() = default;

  Field(int width, int height, double spacing = 1.0, T fill = T{})
      : width_(width), height_(height), spacing_(spacing) {
    check_geometry();
    values_.assign(static_cast<std::size_t>(width) * height, fill);
  }

  Field(int width, int height, double spacing, std::vector<T> values)
      : width_(width), height_(height), spacing_(spacing), values_(std::move(values)) {
    check_geometry();
    if (values_.size() != static_cast<std::size_t>(width) * height) {
      throw ShapeError("field value count " + std::to_string(values_.size()) +
                       " does not match " + std::to_string(width) + "x" +
                       std::to_string(height));
    }
  }

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  double spacing() const noexcept { return spacing_; }
  std::size_t size() const noexcept { return values_.size(); }
  bool empty() const noexcept { return values_.empty(); }

  T& operator()(int row, int col) noexcept { return values_[index(row, col)]; }
  const T& operator()(int row, int col) const noexcept { return values_[index(row, col)]; }

  /// Value at (row, col) with both indices clamped into the grid. Realizes the
  /// homogeneous Neumann boundary: the ghost layer replicates the edge.
  T clamped(int row, int col) const noexcept {
    row = std::clamp(row, 0, height_ - 1);
    col = std::clamp(col, 0, width_ - 1);
    return values_[index(row, col)];
  }

  std::span<T> values() noexcept { return values_; }
  std::span<const T> values() const noexcept { return values_; }

  template <typename U>
  bool same_shape(const Field<U>& other) const noexcept {
    return width_ == other.width() && height_ == other.height();
  }

  friend bool operator==(const Field&, const Field&) = default;

 private:
  std::size_t index(int row, int col) const noexcept {
    return static_cast<std::size_t>(row) * width_ + col;
  }

  void check_geometry() const {
    if (width_ < kMinGridExtent || height_ < kMinGridExtent) {
      throw ShapeError("grid must be at least 3x3, got " + std::to_string(width_) + "x" +
                       std::to_string(height_));
    }
    if (!(spacing_ > 0.0) || !std::isfinite(spacing_)) {
      throw ParameterError("grid spacing must be positive and finite");
    }
  }

  int width_ = 0;
  int height_ = 0;
  double spacing_ = 1.0;
  std::vector<T> values_;
};

using ScalarField = Field<double>;
/// Binary image, 1 = foreground.
using Mask = Field<std::uint8_t>;

template <typename T, typename U>
void require_same_shape(const Field<T>& a, const Field<U>& b, const char* context) {
  if (!a.same_shape(b)) {
    throw ShapeError(std::string(context) + ": field shapes differ (" +
                     std::to_string(a.width()) + "x" + std::to_string(a.height()) + " vs " +
                     std::to_string(b.width()) + "x" + std::to_string(b.height()) + ")");
  }
}

inline bool all_finite(const ScalarField& f) {
  return std::all_of(f.values().begin(), f.values().end(),
                     [](double v) { return std::isfinite(v); });
}

/// Scalar field read with the level-set sign convention: positive inside the
/// curve, negative outside, zero on it.
class LevelSetField {
 public:
  LevelSetField() = default;

  explicit LevelSetField(ScalarField field) : field_(std::move(field)) {
    if (!all_finite(field_)) {
      throw NumericalError("level set contains non-finite values", -1, -1);
    }
  }

  const ScalarField& field() const noexcept { return field_; }
  int width() const noexcept { return field_.width(); }
  int height() const noexcept { return field_.height(); }
  double spacing() const noexcept { return field_.spacing(); }
  std::size_t size() const noexcept { return field_.size(); }
  std::span<const double> values() const noexcept { return field_.values(); }

  double operator()(int row, int col) const noexcept { return field_(row, col); }
  double clamped(int row, int col) const noexcept { return field_.clamped(row, col); }

  /// Same curve with inside and outside exchanged.
  LevelSetField negated() const {
    ScalarField out = field_;
    for (double& v : out.values()) v = -v;
    return LevelSetField(std::move(out));
  }

  /// Scales every value by `factor`; the zero level set is unchanged for
  /// factor > 0.
  LevelSetField scaled(double factor) const {
    ScalarField out = field_;
    for (double& v : out.values()) v *= factor;
    return LevelSetField(std::move(out));
  }

  friend bool operator==(const LevelSetField&, const LevelSetField&) = default;

 private:
  ScalarField field_;
};

enum class Axis { x, y };
enum class Scheme { forward, backward, central };

/// Finite difference of `f` at (row, col), neighbours fetched through
/// clamped(). Divides by the field's spacing.
inline double diff(const ScalarField& f, Axis axis, Scheme scheme, int row, int col) noexcept {
  const int dr = axis == Axis::y ? 1 : 0;
  const int dc = axis == Axis::x ? 1 : 0;
  const double h = f.spacing();
  switch (scheme) {
    case Scheme::forward:
      return (f.clamped(row + dr, col + dc) - f.clamped(row, col)) / h;
    case Scheme::backward:
      return (f.clamped(row, col) - f.clamped(row - dr, col - dc)) / h;
    case Scheme::central:
      return (f.clamped(row + dr, col + dc) - f.clamped(row - dr, col - dc)) / (2.0 * h);
  }
  return 0.0;
}

/// Central-difference gradient magnitude at (row, col).
inline double gradient_norm(const ScalarField& f, int row, int col) noexcept {
  const double gx = diff(f, Axis::x, Scheme::central, row, col);
  const double gy = diff(f, Axis::y, Scheme::central, row, col);
  return std::hypot(gx, gy);
}

}  // namespace chanvese
