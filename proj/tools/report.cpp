#include "report.hpp"

#include <cmath>

#include <fmt/format.h>

namespace slitcarpet::cli {

std::string format_real(double v) {
  std::string s = fmt::format("{}", v);
  if (std::isfinite(v) && s.find_first_of(".e") == std::string::npos) s += ".0";
  return s;
}

Report::Report(std::string_view command) { record({{"command", std::string(command)}}); }

void Report::record(std::initializer_list<Field> fields) { record(std::vector<Field>(fields)); }

void Report::record(const std::vector<Field>& fields) {
  std::string line;
  for (const Field& f : fields) {
    if (!line.empty()) line += ' ';
    line += f.key;
    line += '=';
    if (f.value.find(' ') != std::string::npos) {
      line += '"' + f.value + '"';
    } else {
      line += f.value;
    }
  }
  lines_.push_back(std::move(line));
}

void Report::fail(std::string_view reason) {
  failed_ = true;
  record({{"failure", std::string(reason)}});
}

std::string Report::str() const {
  std::string out(kHeader);
  out += '\n';
  for (const auto& line : lines_) out += line + '\n';
  out += failed_ ? "status=fail\n" : "status=ok\n";
  return out;
}

}  // namespace slitcarpet::cli
