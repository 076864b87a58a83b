#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "evth/errors.hpp"

namespace evth {

/// Periodic uniform grid covering a 3-torus: the same point count and period
/// on each axis, values stored x-fastest.
class GridSpec {
 public:
  GridSpec() = default;
  GridSpec(int npts_per_axis, double period) : npts_(npts_per_axis), period_(period) {
    if (npts_ < 8) throw ConfigError("grid needs at least 8 points per axis for the 5-point stencil");
    if (!(period_ > 0.0)) throw ConfigError("grid period must be positive");
    spacing_ = period_ / npts_;
  }

  int npts() const { return npts_; }
  double period() const { return period_; }
  double spacing() const { return spacing_; }
  std::size_t size() const {
    return static_cast<std::size_t>(npts_) * npts_ * npts_;
  }
  std::size_t index(int i, int j, int k) const {
    return static_cast<std::size_t>(i) +
           static_cast<std::size_t>(npts_) * (static_cast<std::size_t>(j) +
                                              static_cast<std::size_t>(npts_) * k);
  }
  std::array<int, 3> coords_of(std::size_t p) const {
    const int n = npts_;
    const int i = static_cast<int>(p % n);
    const int j = static_cast<int>((p / n) % n);
    const int k = static_cast<int>(p / (static_cast<std::size_t>(n) * n));
    return {i, j, k};
  }
  /// Coordinate of grid index along one axis.
  double coord(int i) const { return spacing_ * i; }
  double cell_volume() const { return spacing_ * spacing_ * spacing_; }

  /// Shortest periodic displacement a-b along one axis.
  double wrap_delta(double a, double b) const {
    double d = a - b;
    while (d > 0.5 * period_) d -= period_;
    while (d < -0.5 * period_) d += period_;
    return d;
  }
  /// Periodic Euclidean distance between two coordinate triples.
  double distance(const std::array<double, 3>& a, const std::array<double, 3>& b) const {
    const double dx = wrap_delta(a[0], b[0]);
    const double dy = wrap_delta(a[1], b[1]);
    const double dz = wrap_delta(a[2], b[2]);
    return std::sqrt(dx * dx + dy * dy + dz * dz);
  }

  bool operator==(const GridSpec& o) const {
    return npts_ == o.npts_ && period_ == o.period_;
  }

 private:
  int npts_ = 0;
  double period_ = 0.0;
  double spacing_ = 0.0;
};

namespace detail {

/// Contiguous block of `ncomp` planes of grid.size() doubles each.
class FieldBlock {
 public:
  FieldBlock() = default;
  FieldBlock(const GridSpec& grid, int ncomp, double fill = 0.0)
      : grid_(grid), ncomp_(ncomp), v_(grid.size() * ncomp, fill) {}

  const GridSpec& grid() const { return grid_; }
  int ncomp() const { return ncomp_; }

  double* plane(int c) { return v_.data() + static_cast<std::size_t>(c) * grid_.size(); }
  const double* plane(int c) const {
    return v_.data() + static_cast<std::size_t>(c) * grid_.size();
  }
  std::span<double> comp(int c) { return {plane(c), grid_.size()}; }
  std::span<const double> comp(int c) const { return {plane(c), grid_.size()}; }

  std::span<double> raw() { return v_; }
  std::span<const double> raw() const { return v_; }

  bool same_shape(const FieldBlock& o) const {
    return grid_ == o.grid_ && ncomp_ == o.ncomp_;
  }

 private:
  GridSpec grid_;
  int ncomp_ = 0;
  std::vector<double> v_;
};

}  // namespace detail

class ScalarField : public detail::FieldBlock {
 public:
  ScalarField() = default;
  explicit ScalarField(const GridSpec& grid, double fill = 0.0)
      : FieldBlock(grid, 1, fill) {}
  double& operator[](std::size_t p) { return plane(0)[p]; }
  double operator[](std::size_t p) const { return plane(0)[p]; }
  double& at(int i, int j, int k) { return plane(0)[grid().index(i, j, k)]; }
  double at(int i, int j, int k) const { return plane(0)[grid().index(i, j, k)]; }
  const double* data() const { return plane(0); }
  double* data() { return plane(0); }
};

class Vec3Field : public detail::FieldBlock {
 public:
  Vec3Field() = default;
  explicit Vec3Field(const GridSpec& grid, double fill = 0.0)
      : FieldBlock(grid, 3, fill) {}
};

/// Symmetric 2-tensor components stored as planes xx, xy, xz, yy, yz, zz.
class SymTensorField : public detail::FieldBlock {
 public:
  enum Comp { XX = 0, XY = 1, XZ = 2, YY = 3, YZ = 4, ZZ = 5 };

  SymTensorField() = default;
  explicit SymTensorField(const GridSpec& grid, double fill = 0.0)
      : FieldBlock(grid, 6, fill) {}

  /// Flattened index of the (a,b) component, a,b in 0..2.
  static int sym_index(int a, int b) {
    static constexpr int table[3][3] = {{XX, XY, XZ}, {XY, YY, YZ}, {XZ, YZ, ZZ}};
    return table[a][b];
  }
};

/// Rank-3 field symmetric in the lower index pair: comp(c, (ab)) with
/// c in 0..2 and (ab) a SymTensorField component index.
class Rank3Field : public detail::FieldBlock {
 public:
  Rank3Field() = default;
  explicit Rank3Field(const GridSpec& grid, double fill = 0.0)
      : FieldBlock(grid, 18, fill) {}
  double* plane_cab(int c, int ab) { return plane(c * 6 + ab); }
  const double* plane_cab(int c, int ab) const { return plane(c * 6 + ab); }
};

}  // namespace evth
