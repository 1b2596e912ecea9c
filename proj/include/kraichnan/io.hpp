#pragma once

// Artifact writers: CSV tables, JSON constants, the manifest, and the
// binary increment/field dumps (little-endian 64-bit doubles).

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "kraichnan/grid.hpp"
#include "kraichnan/noise.hpp"

namespace kraichnan {

class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path,
            const std::vector<std::string>& columns)
      : out_(path) {
    if (!out_) throw std::runtime_error("CsvWriter: cannot open " + path.string());
    for (std::size_t i = 0; i < columns.size(); ++i)
      out_ << (i ? "," : "") << columns[i];
    out_ << "\n";
    out_ << std::setprecision(17);
  }

  void row(const std::vector<double>& values) {
    for (std::size_t i = 0; i < values.size(); ++i)
      out_ << (i ? "," : "") << values[i];
    out_ << "\n";
  }

  void flush() { out_.flush(); }

 private:
  std::ofstream out_;
};

inline void write_json(const std::filesystem::path& path,
                       const nlohmann::json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_json: cannot open " + path.string());
  out << j.dump(2) << "\n";
}

// Binary increment dump: header {L, N, dt, alpha, delta, seed, step} then
// row-major (vx, vy) complex pairs as little-endian f64.
inline void write_increment_binary(const std::filesystem::path& path,
                                   const NoiseIncrement& inc, double alpha,
                                   double delta) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("write_increment_binary: cannot open " + path.string());
  auto put_f64 = [&](double v) { out.write(reinterpret_cast<const char*>(&v), 8); };
  auto put_u64 = [&](std::uint64_t v) { out.write(reinterpret_cast<const char*>(&v), 8); };
  put_f64(inc.box_len);
  put_u64(static_cast<std::uint64_t>(inc.n));
  put_f64(inc.dt);
  put_f64(alpha);
  put_f64(delta);
  put_u64(inc.seed);
  put_u64(inc.step);
  for (std::size_t i = 0; i < inc.vx.size(); ++i) {
    put_f64(inc.vx[i].real());
    put_f64(inc.vx[i].imag());
    put_f64(inc.vy[i].real());
    put_f64(inc.vy[i].imag());
  }
}

// Field snapshot: header {N, L, t} + row-major real f64 grid.
inline void write_field_binary(const std::filesystem::path& path,
                               const Grid& grid, const SpectralField& field,
                               double t) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("write_field_binary: cannot open " + path.string());
  auto put_f64 = [&](double v) { out.write(reinterpret_cast<const char*>(&v), 8); };
  auto put_u64 = [&](std::uint64_t v) { out.write(reinterpret_cast<const char*>(&v), 8); };
  put_u64(static_cast<std::uint64_t>(grid.n()));
  put_f64(grid.box_len());
  put_f64(t);
  auto w = grid.backward(field.coeffs);
  for (double v : w) put_f64(v);
}

}  // namespace kraichnan
