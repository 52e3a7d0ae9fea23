#include "matherkit/report_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace matherkit {

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  if (value == 0.0) return "0";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::general, 12);
  return std::string(buf, res.ptr);
}

void write_cloud_csv(std::ostream& out, const PointCloud& cloud) {
  out << "x,v\n";
  for (const auto& p : cloud.points) out << format_number(p.x) << ',' << format_number(p.v) << '\n';
}

void write_measure_csv(std::ostream& out, const OccupationMeasure& measure) {
  out << "x,v,weight\n";
  for (int i = 0; i < measure.grid.nx; ++i) {
    for (int j = 0; j < measure.grid.nv; ++j) {
      const double w = measure.weight(i, j);
      if (w == 0.0) continue;
      out << format_number(measure.grid.position(i)) << ',' << format_number(measure.grid.velocity(j))
          << ',' << format_number(w) << '\n';
    }
  }
}

void write_table_csv(std::ostream& out, const PotentialTable& table) {
  out << "i,j,x_i,x_j,value\n";
  const double h = kTwoPi / table.nx;
  for (int i = 0; i < table.nx; ++i) {
    for (int j = 0; j < table.nx; ++j) {
      out << i << ',' << j << ',' << format_number(i * h) << ',' << format_number(j * h) << ','
          << format_number(table.at(i, j)) << '\n';
    }
  }
}

void write_scan_csv(std::ostream& out, const std::vector<ScanRow>& rows) {
  out << "c,alpha,alpha_lp,d_H_mather_aubry,d_H_aubry_mane,measure_support_size,flags\n";
  for (const auto& r : rows) {
    std::string flags;
    for (const auto& f : r.flags) {
      if (!flags.empty()) flags += ';';
      // Keep each flag on one CSV field.
      for (char ch : f) flags += (ch == ',' || ch == '\n' || ch == '"') ? ' ' : ch;
    }
    out << format_number(r.c) << ',' << format_number(r.alpha) << ','
        << format_number(r.alpha_lp) << ',' << format_number(r.d_H_mather_aubry) << ','
        << format_number(r.d_H_aubry_mane) << ',' << r.measure_support_size << ',' << flags
        << '\n';
  }
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

}  // namespace matherkit
