#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace revaudit::csv {

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  // Index of a header column; throws Error(parse) naming `context` when absent.
  std::size_t column(const std::string& name, const std::string& context) const;
};

// RFC 4180 subset: comma separator, double-quote quoting, LF or CRLF lines.
Table read(const std::filesystem::path& path);
Table parse(const std::string& text, const std::string& context);

std::string escape(const std::string& field);
std::string format_row(const std::vector<std::string>& fields);
void write(const std::filesystem::path& path, const Table& table);

}  // namespace revaudit::csv
