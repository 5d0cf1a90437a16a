#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

namespace recon::cli {

/// Shortest text that reads back to the same double; inf, -inf and nan spelled out.
std::string format_number(double v);

/// RFC 4180 quoting: fields holding a comma, quote, CR or LF are wrapped in
/// quotes with inner quotes doubled.
std::string quote_field(std::string_view field);

/// Splits one record. Quoted fields may hold commas and doubled quotes.
std::vector<std::string> parse_record(std::string_view line);

/// Writes "# config: ..." then the header, LF line endings.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, std::string_view config, const std::vector<std::string>& header);

  void row(const std::vector<std::string>& fields);

 private:
  std::ofstream out_;
  std::size_t width_;
};

}  // namespace recon::cli
