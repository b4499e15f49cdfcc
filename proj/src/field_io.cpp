#include "minerr/field_io.hpp"

#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <functional>
#include <numeric>
#include <sstream>

#include "minerr/error.hpp"

namespace minerr {

std::string format_double(double value) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  if (ec != std::errc{}) fail(ErrorCode::Io, "cannot format number");
  return std::string(buf, ptr);
}

namespace {

std::size_t element_count(const std::vector<std::size_t>& shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
}

std::filesystem::path sidecar(const std::filesystem::path& path) {
  auto s = path;
  s += ".txt";
  return s;
}

std::uint64_t to_little(std::uint64_t bits) {
  if constexpr (std::endian::native == std::endian::big) {
    std::uint64_t out = 0;
    for (int i = 0; i < 8; ++i) out |= ((bits >> (8 * i)) & 0xffu) << (8 * (7 - i));
    return out;
  }
  return bits;
}

}  // namespace

void write_field(const std::filesystem::path& path, std::span<const double> values,
                 const std::vector<std::size_t>& shape, double spacing, std::string_view label) {
  require(element_count(shape) == values.size(), ErrorCode::DimensionMismatch,
          "field shape does not match the number of values");
  std::ofstream bin(path, std::ios::binary);
  if (!bin) fail(ErrorCode::Io, "cannot open " + path.string() + " for writing");
  for (double v : values) {
    const std::uint64_t bits = to_little(std::bit_cast<std::uint64_t>(v));
    char bytes[8];
    std::memcpy(bytes, &bits, 8);
    bin.write(bytes, 8);
  }
  if (!bin) fail(ErrorCode::Io, "write failed: " + path.string());

  std::ofstream meta(sidecar(path));
  if (!meta) fail(ErrorCode::Io, "cannot open " + sidecar(path).string() + " for writing");
  meta << "format float64-le row-major\nshape";
  for (std::size_t d : shape) meta << ' ' << d;
  meta << "\nspacing " << format_double(spacing) << "\nlabel " << label << '\n';
}

FieldFile read_field(const std::filesystem::path& path) {
  FieldFile out;
  std::ifstream meta(sidecar(path));
  if (!meta) fail(ErrorCode::Io, "missing sidecar " + sidecar(path).string());
  std::string line;
  while (std::getline(meta, line)) {
    std::istringstream ls(line);
    std::string key;
    ls >> key;
    if (key == "shape") {
      std::size_t d;
      while (ls >> d) out.shape.push_back(d);
    } else if (key == "spacing") {
      ls >> out.spacing;
    } else if (key == "label") {
      std::getline(ls >> std::ws, out.label);
    }
  }
  require(!out.shape.empty(), ErrorCode::Io, "sidecar of " + path.string() + " has no shape");

  const std::size_t count = element_count(out.shape);
  std::ifstream bin(path, std::ios::binary);
  if (!bin) fail(ErrorCode::Io, "cannot open " + path.string());
  out.values.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    char bytes[8];
    if (!bin.read(bytes, 8)) fail(ErrorCode::Io, path.string() + " is shorter than its shape");
    std::uint64_t bits;
    std::memcpy(&bits, bytes, 8);
    out.values[i] = std::bit_cast<double>(to_little(bits));
  }
  if (bin.peek() != std::char_traits<char>::eof())
    fail(ErrorCode::Io, path.string() + " is longer than its shape");
  return out;
}

void write_field_csv(const std::filesystem::path& path, std::span<const double> values,
                     const std::vector<std::size_t>& shape) {
  require(shape.size() == 1 || shape.size() == 2, ErrorCode::InvalidArgument,
          "CSV export handles 1-D and 2-D fields");
  require(element_count(shape) == values.size(), ErrorCode::DimensionMismatch,
          "field shape does not match the number of values");
  std::ofstream csv(path);
  if (!csv) fail(ErrorCode::Io, "cannot open " + path.string() + " for writing");
  if (shape.size() == 1) {
    csv << "i,value\n";
    for (std::size_t i = 0; i < values.size(); ++i) csv << i << ',' << format_double(values[i]) << '\n';
    return;
  }
  const std::size_t cols = shape[1];
  for (std::size_t r = 0; r < shape[0]; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      if (c) csv << ',';
      csv << format_double(values[r * cols + c]);
    }
    csv << '\n';
  }
}

std::vector<double> slice_first_axis(std::span<const double> values,
                                     const std::vector<std::size_t>& shape, std::size_t index) {
  require(shape.size() == 3 && index < shape[0], ErrorCode::InvalidArgument,
          "slice needs a 3-D field and an index inside its first axis");
  const std::size_t plane = shape[1] * shape[2];
  auto first = values.begin() + static_cast<std::ptrdiff_t>(index * plane);
  return std::vector<double>(first, first + static_cast<std::ptrdiff_t>(plane));
}

}  // namespace minerr
