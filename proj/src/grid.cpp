#include "kinlim/grid.hpp"

#include <cmath>
#include <string>

#include "kinlim/errors.hpp"

namespace kinlim {

SpatialGrid::SpatialGrid(int d, double half_length, int cells_per_axis)
    : d_(d), half_length_(half_length), cells_(cells_per_axis) {
  if (d != 1 && d != 2) throw DomainError("SpatialGrid: d must be 1 or 2, got " + std::to_string(d));
  if (!(half_length > 0.0) || !std::isfinite(half_length))
    throw DomainError("SpatialGrid: half_length must be positive and finite");
  if (cells_per_axis < 8 || cells_per_axis % 2 != 0)
    throw DomainError("SpatialGrid: cells_per_axis must be even and >= 8, got " +
                      std::to_string(cells_per_axis));
}

double SpatialGrid::cell_volume() const noexcept { return std::pow(spacing(), d_); }

double SpatialGrid::domain_volume() const noexcept { return std::pow(2.0 * half_length_, d_); }

std::size_t SpatialGrid::size() const noexcept {
  return d_ == 1 ? std::size_t(cells_) : std::size_t(cells_) * std::size_t(cells_);
}

std::array<int, 2> SpatialGrid::unflatten(std::size_t flat) const noexcept {
  if (d_ == 1) return {int(flat), 0};
  return {int(flat / cells_), int(flat % cells_)};
}

std::size_t SpatialGrid::flatten(int i0, int i1) const noexcept {
  return d_ == 1 ? std::size_t(i0) : std::size_t(i0) * cells_ + std::size_t(i1);
}

double SpatialGrid::radius_sq(std::size_t flat) const noexcept {
  auto idx = unflatten(flat);
  double r2 = 0.0;
  for (int a = 0; a < d_; ++a) {
    double x = center(idx[a]);
    r2 += x * x;
  }
  return r2;
}

VelocityGrid::VelocityGrid(int d, double v_max, int cells_per_axis)
    : d_(d), v_max_(v_max), cells_(cells_per_axis) {
  if (d != 1 && d != 2) throw DomainError("VelocityGrid: d must be 1 or 2, got " + std::to_string(d));
  if (!(v_max > 0.0) || !std::isfinite(v_max))
    throw DomainError("VelocityGrid: v_max must be positive and finite");
  if (cells_per_axis < 2 || cells_per_axis % 2 != 0)
    throw DomainError("VelocityGrid: cells_per_axis must be even, got " +
                      std::to_string(cells_per_axis));
}

double VelocityGrid::cell_volume() const noexcept { return std::pow(spacing(), d_); }

std::size_t VelocityGrid::size() const noexcept {
  return d_ == 1 ? std::size_t(cells_) : std::size_t(cells_) * std::size_t(cells_);
}

std::array<int, 2> VelocityGrid::unflatten(std::size_t flat) const noexcept {
  if (d_ == 1) return {int(flat), 0};
  return {int(flat / cells_), int(flat % cells_)};
}

std::size_t VelocityGrid::flatten(int j0, int j1) const noexcept {
  return d_ == 1 ? std::size_t(j0) : std::size_t(j0) * cells_ + std::size_t(j1);
}

double VelocityGrid::speed_sq(std::size_t flat) const noexcept {
  auto idx = unflatten(flat);
  double s = 0.0;
  for (int a = 0; a < d_; ++a) {
    double v = center(idx[a]);
    s += v * v;
  }
  return s;
}

}  // namespace kinlim
