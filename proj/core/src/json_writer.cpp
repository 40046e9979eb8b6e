#include "json_writer.hpp"

#include "json.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace skintone::detail {

std::string format_double17(double v) {
  if (!std::isfinite(v)) throw std::invalid_argument("non-finite value in model file");
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void JsonWriter::newline() {
  out_ += '\n';
  out_.append(static_cast<std::size_t>(depth_) * 2, ' ');
}

void JsonWriter::separator() {
  if (after_key_) {
    after_key_ = false;
    return;
  }
  if (!first_) out_ += ',';
  if (depth_ > 0) newline();
  first_ = false;
}

JsonWriter& JsonWriter::begin_object() {
  separator();
  out_ += '{';
  ++depth_;
  first_ = true;
  return *this;
}

JsonWriter& JsonWriter::end_object() {
  --depth_;
  if (!first_) newline();
  out_ += '}';
  first_ = false;
  return *this;
}

JsonWriter& JsonWriter::key(std::string_view name) {
  separator();
  out_ += nlohmann::json(std::string(name)).dump();
  out_ += ": ";
  after_key_ = true;
  return *this;
}

JsonWriter& JsonWriter::value(double v) {
  separator();
  out_ += format_double17(v);
  return *this;
}

JsonWriter& JsonWriter::value(std::int64_t v) {
  separator();
  out_ += std::to_string(v);
  return *this;
}

JsonWriter& JsonWriter::value(std::uint64_t v) {
  separator();
  out_ += std::to_string(v);
  return *this;
}

JsonWriter& JsonWriter::value(bool v) {
  separator();
  out_ += v ? "true" : "false";
  return *this;
}

JsonWriter& JsonWriter::value(std::string_view s) {
  separator();
  out_ += nlohmann::json(std::string(s)).dump();
  return *this;
}

JsonWriter& JsonWriter::value(std::span<const double> values) {
  separator();
  out_ += '[';
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out_ += ", ";
    out_ += format_double17(values[i]);
  }
  out_ += ']';
  return *this;
}

JsonWriter& JsonWriter::matrix(std::span<const double> row_major, std::size_t rows,
                               std::size_t cols) {
  separator();
  out_ += '[';
  ++depth_;
  for (std::size_t r = 0; r < rows; ++r) {
    if (r) out_ += ',';
    newline();
    out_ += '[';
    for (std::size_t c = 0; c < cols; ++c) {
      if (c) out_ += ", ";
      out_ += format_double17(row_major[r * cols + c]);
    }
    out_ += ']';
  }
  --depth_;
  if (rows) newline();
  out_ += ']';
  return *this;
}

} // namespace skintone::detail
