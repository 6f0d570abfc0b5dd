#pragma once

#include <array>
#include <cstddef>

namespace kinlim {

/// Periodic box [-L, L)^d split into Nx cells per axis. d is 1 or 2.
class SpatialGrid {
 public:
  SpatialGrid() = default;
  SpatialGrid(int d, double half_length, int cells_per_axis);

  int dim() const noexcept { return d_; }
  double half_length() const noexcept { return half_length_; }
  int cells_per_axis() const noexcept { return cells_; }
  double spacing() const noexcept { return 2.0 * half_length_ / cells_; }
  double cell_volume() const noexcept;
  double domain_volume() const noexcept;
  std::size_t size() const noexcept;

  double center(int i) const noexcept { return -half_length_ + (i + 0.5) * spacing(); }
  /// Per-axis indices of a flat cell index (row-major, last axis fastest).
  std::array<int, 2> unflatten(std::size_t flat) const noexcept;
  std::size_t flatten(int i0, int i1 = 0) const noexcept;
  /// Squared distance of a cell center to the origin.
  double radius_sq(std::size_t flat) const noexcept;

  bool operator==(const SpatialGrid&) const = default;

 private:
  int d_ = 1;
  double half_length_ = 1.0;
  int cells_ = 8;
};

/// Symmetric velocity box [-v_max, v_max)^d with Nv cells per axis; Nv even
/// so that the cell centers are symmetric about 0 and v = 0 is a face.
class VelocityGrid {
 public:
  VelocityGrid() = default;
  VelocityGrid(int d, double v_max, int cells_per_axis);

  int dim() const noexcept { return d_; }
  double v_max() const noexcept { return v_max_; }
  int cells_per_axis() const noexcept { return cells_; }
  double spacing() const noexcept { return 2.0 * v_max_ / cells_; }
  double cell_volume() const noexcept;
  std::size_t size() const noexcept;

  double center(int j) const noexcept { return -v_max_ + (j + 0.5) * spacing(); }
  std::array<int, 2> unflatten(std::size_t flat) const noexcept;
  std::size_t flatten(int j0, int j1 = 0) const noexcept;
  double speed_sq(std::size_t flat) const noexcept;

  bool operator==(const VelocityGrid&) const = default;

 private:
  int d_ = 1;
  double v_max_ = 1.0;
  int cells_ = 2;
};

}  // namespace kinlim
