#pragma once

// CSV and binary serialization of fields.
//
// Binary layout, little-endian, 32-byte header followed by float64 values in
// storage order:
//
//   offset  size  content
//        0     8  magic "KINLIM01"
//        8     2  uint16 d
//       10     2  uint16 kind (0 distribution, 1 density)
//       12     2  uint16 Nx (cells per spatial axis)
//       14     2  uint16 Nv (cells per velocity axis, 0 for densities)
//       16     8  float64 L (spatial half length)
//       24     8  float64 v_max (0 for densities)

#include <iosfwd>
#include <string>
#include <variant>

#include "kinlim/fields.hpp"

namespace kinlim {

void write_csv(std::ostream& os, const DistributionField& f);
void write_csv(std::ostream& os, const DensityField& rho);

void write_binary(std::ostream& os, const DistributionField& f);
void write_binary(std::ostream& os, const DensityField& rho);

using AnyField = std::variant<DistributionField, DensityField>;
/// Throws ShapeError on a bad magic, unknown kind or truncated payload.
AnyField read_binary(std::istream& is);

void save_binary(const std::string& path, const DistributionField& f);
void save_binary(const std::string& path, const DensityField& rho);
AnyField load_binary(const std::string& path);

/// Formats a double with 17 significant digits.
std::string format_double(double x);

}  // namespace kinlim
