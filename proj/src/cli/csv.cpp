#include "csv.hpp"

#include <array>
#include <charconv>
#include <cmath>

#include "recon/error.hpp"

namespace recon::cli {

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::array<char, 32> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return {buf.data(), res.ptr};
}

std::string quote_field(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
  std::string s = "\"";
  for (char c : field) {
    if (c == '"') s += '"';
    s += c;
  }
  s += '"';
  return s;
}

std::vector<std::string> parse_record(std::string_view line) {
  std::vector<std::string> out(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        out.back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        out.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.emplace_back();
    } else if (c != '\r') {
      out.back() += c;
    }
  }
  return out;
}

CsvWriter::CsvWriter(const std::filesystem::path& path, std::string_view config, const std::vector<std::string>& header)
    : out_(path, std::ios::binary | std::ios::trunc), width_(header.size()) {
  if (!out_) throw Error(ErrorKind::invalid_argument, "cannot write " + path.string());
  std::string line(config);
  for (char& c : line)
    if (c == '\n' || c == '\r') c = ' ';
  out_ << "# config: " << line << '\n';
  row(header);
}

void CsvWriter::row(const std::vector<std::string>& fields) {
  if (fields.size() != width_) throw Error(ErrorKind::invalid_argument, "csv row width does not match the header");
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i > 0) out_ << ',';
    out_ << quote_field(fields[i]);
  }
  out_ << '\n';
}

}  // namespace recon::cli
