#include "kinlim/field_io.hpp"

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>

#include "kinlim/errors.hpp"

namespace kinlim {

namespace {

constexpr char kMagic[8] = {'K', 'I', 'N', 'L', 'I', 'M', '0', '1'};

void put_u16(std::ostream& os, std::uint16_t v) {
  const unsigned char b[2] = {static_cast<unsigned char>(v & 0xff),
                              static_cast<unsigned char>(v >> 8)};
  os.write(reinterpret_cast<const char*>(b), 2);
}

void put_f64(std::ostream& os, double x) {
  const auto bits = std::bit_cast<std::uint64_t>(x);
  unsigned char b[8];
  for (int k = 0; k < 8; ++k) b[k] = static_cast<unsigned char>((bits >> (8 * k)) & 0xff);
  os.write(reinterpret_cast<const char*>(b), 8);
}

std::uint16_t get_u16(const unsigned char* b) { return std::uint16_t(b[0] | (b[1] << 8)); }

double get_f64(const unsigned char* b) {
  std::uint64_t bits = 0;
  for (int k = 0; k < 8; ++k) bits |= std::uint64_t(b[k]) << (8 * k);
  return std::bit_cast<double>(bits);
}

std::uint16_t checked_u16(int v, const char* what) {
  if (v < 0 || v > 0xffff) throw ShapeError(std::string("binary dump: ") + what + " does not fit in 16 bits");
  return std::uint16_t(v);
}

void write_header(std::ostream& os, int d, int kind, int nx, int nv, double L, double vmax) {
  os.write(kMagic, 8);
  put_u16(os, checked_u16(d, "d"));
  put_u16(os, checked_u16(kind, "kind"));
  put_u16(os, checked_u16(nx, "Nx"));
  put_u16(os, checked_u16(nv, "Nv"));
  put_f64(os, L);
  put_f64(os, vmax);
}

void write_coords(std::ostream& os, const SpatialGrid& g, std::size_t cell) {
  auto idx = g.unflatten(cell);
  for (int a = 0; a < g.dim(); ++a) os << format_double(g.center(idx[a])) << ',';
}

}  // namespace

std::string format_double(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

void write_csv(std::ostream& os, const DistributionField& f) {
  const int d = f.xgrid.dim();
  os << (d == 1 ? "x,v,f\n" : "x0,x1,v0,v1,f\n");
  for (std::size_t i = 0; i < f.xgrid.size(); ++i) {
    auto sl = f.slice(i);
    for (std::size_t j = 0; j < f.vgrid.size(); ++j) {
      write_coords(os, f.xgrid, i);
      auto vj = f.vgrid.unflatten(j);
      for (int a = 0; a < d; ++a) os << format_double(f.vgrid.center(vj[a])) << ',';
      os << format_double(sl[j]) << '\n';
    }
  }
}

void write_csv(std::ostream& os, const DensityField& rho) {
  os << (rho.grid.dim() == 1 ? "x,rho\n" : "x0,x1,rho\n");
  for (std::size_t i = 0; i < rho.grid.size(); ++i) {
    write_coords(os, rho.grid, i);
    os << format_double(rho.values[i]) << '\n';
  }
}

void write_binary(std::ostream& os, const DistributionField& f) {
  write_header(os, f.xgrid.dim(), 0, f.xgrid.cells_per_axis(), f.vgrid.cells_per_axis(),
               f.xgrid.half_length(), f.vgrid.v_max());
  for (double v : f.values) put_f64(os, v);
}

void write_binary(std::ostream& os, const DensityField& rho) {
  write_header(os, rho.grid.dim(), 1, rho.grid.cells_per_axis(), 0, rho.grid.half_length(), 0.0);
  for (double v : rho.values) put_f64(os, v);
}

AnyField read_binary(std::istream& is) {
  std::array<unsigned char, 32> h{};
  if (!is.read(reinterpret_cast<char*>(h.data()), 32)) throw ShapeError("binary dump: truncated header");
  if (std::memcmp(h.data(), kMagic, 8) != 0) throw ShapeError("binary dump: bad magic");
  const int d = get_u16(&h[8]);
  const int kind = get_u16(&h[10]);
  const int nx = get_u16(&h[12]);
  const int nv = get_u16(&h[14]);
  const double L = get_f64(&h[16]);
  const double vmax = get_f64(&h[24]);

  SpatialGrid xg(d, L, nx);
  auto read_values = [&](std::size_t count) {
    std::vector<double> vals(count);
    unsigned char b[8];
    for (auto& v : vals) {
      if (!is.read(reinterpret_cast<char*>(b), 8)) throw ShapeError("binary dump: truncated payload");
      v = get_f64(b);
    }
    return vals;
  };
  if (kind == 0) {
    VelocityGrid vg(d, vmax, nv);
    return DistributionField(xg, vg, read_values(xg.size() * vg.size()));
  }
  if (kind == 1) return DensityField(xg, read_values(xg.size()));
  throw ShapeError("binary dump: unknown field kind " + std::to_string(kind));
}

void save_binary(const std::string& path, const DistributionField& f) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot open " + path + " for writing");
  write_binary(os, f);
}

void save_binary(const std::string& path, const DensityField& rho) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot open " + path + " for writing");
  write_binary(os, rho);
}

AnyField load_binary(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("cannot open " + path);
  return read_binary(is);
}

}  // namespace kinlim
