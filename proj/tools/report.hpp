#pragma once

#include <initializer_list>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

namespace slitcarpet::cli {

/// Shortest decimal that round-trips, always with a decimal point ("1.0").
std::string format_real(double v);

/// One key=value pair of a report record. Values holding spaces are quoted.
struct Field {
  std::string key;
  std::string value;

  Field(std::string_view k, std::string v) : key(k), value(std::move(v)) {}
  Field(std::string_view k, const char* v) : key(k), value(v) {}
  Field(std::string_view k, bool v) : key(k), value(v ? "true" : "false") {}
  template <class T>
    requires std::is_integral_v<T>
  Field(std::string_view k, T v) : key(k), value(std::to_string(v)) {}
  Field(std::string_view k, double v) : key(k), value(format_real(v)) {}
};

/// Line-oriented report: a versioned header, then one record per line.
class Report {
 public:
  static constexpr std::string_view kHeader = "# slitcarpet-report v1";

  explicit Report(std::string_view command);

  void record(std::initializer_list<Field> fields);
  void record(const std::vector<Field>& fields);
  /// Marks an assertion failure; the CLI then exits with status 1.
  void fail(std::string_view reason);
  bool failed() const { return failed_; }

  std::string str() const;

 private:
  std::vector<std::string> lines_;
  bool failed_ = false;
};

}  // namespace slitcarpet::cli
