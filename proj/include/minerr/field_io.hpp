#pragma once

// Grid fields as raw little-endian float64 (row-major, last axis fastest) with a
// text sidecar holding the shape, and 1-D/2-D slices as CSV.

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace minerr {

/// Shortest decimal text that reads back to the same double.
std::string format_double(double value);

struct FieldFile {
  std::vector<double> values;
  std::vector<std::size_t> shape;
  double spacing = 0.0;
  std::string label;
};

/// Writes `path` (binary) and `path` + ".txt" (shape, spacing, label).
void write_field(const std::filesystem::path& path, std::span<const double> values,
                 const std::vector<std::size_t>& shape, double spacing, std::string_view label);
FieldFile read_field(const std::filesystem::path& path);

/// 1-D: "i,value" rows; 2-D: one CSV row per index of the first axis.
void write_field_csv(const std::filesystem::path& path, std::span<const double> values,
                     const std::vector<std::size_t>& shape);

/// The 2-D slice at `index` along the first axis of a 3-D field.
std::vector<double> slice_first_axis(std::span<const double> values,
                                     const std::vector<std::size_t>& shape, std::size_t index);

}  // namespace minerr
