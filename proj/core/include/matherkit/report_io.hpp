// CSV output with a fixed numeric format: '.' decimal, 12 significant digits.
#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "matherkit/critical.hpp"
#include "matherkit/experiments.hpp"
#include "matherkit/potential.hpp"
#include "matherkit/sets.hpp"

namespace matherkit {

/// Locale-independent shortest form with at most 12 significant digits.
std::string format_number(double value);

/// Columns x, v.
void write_cloud_csv(std::ostream& out, const PointCloud& cloud);
/// Columns x, v, weight; cells with zero weight are skipped.
void write_measure_csv(std::ostream& out, const OccupationMeasure& measure);
/// Columns i, j, x_i, x_j, value.
void write_table_csv(std::ostream& out, const PotentialTable& table);
/// Columns c, alpha, alpha_lp, d_H_mather_aubry, d_H_aubry_mane,
/// measure_support_size, flags (';'-separated).
void write_scan_csv(std::ostream& out, const std::vector<ScanRow>& rows);

/// Writes text to path, creating parent directories.
/// Throws std::runtime_error when the file cannot be written.
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace matherkit
