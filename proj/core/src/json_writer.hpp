#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>

namespace skintone::detail {

/// "%.17g": enough digits that every double reads back bit-exactly.
std::string format_double17(double v);

/// Minimal pretty-printing writer for model files. Doubles are written with
/// 17 significant digits; nlohmann's dump() would use shortest round-trip form.
class JsonWriter {
public:
  JsonWriter& begin_object();
  JsonWriter& end_object();
  JsonWriter& key(std::string_view name);
  JsonWriter& value(double v);
  JsonWriter& value(std::int64_t v);
  JsonWriter& value(std::uint64_t v);
  JsonWriter& value(int v) { return value(static_cast<std::int64_t>(v)); }
  JsonWriter& value(bool v);
  JsonWriter& value(std::string_view s);
  JsonWriter& value(std::span<const double> values);
  /// Row-major matrix as an array of row arrays.
  JsonWriter& matrix(std::span<const double> row_major, std::size_t rows, std::size_t cols);

  std::string str() const { return out_ + "\n"; }

private:
  void separator();
  void newline();

  std::string out_;
  int depth_ = 0;
  bool first_ = true;
  bool after_key_ = false;
};

} // namespace skintone::detail
