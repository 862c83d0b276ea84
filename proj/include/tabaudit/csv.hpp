#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

namespace tabaudit {

// A parsed text grid: header row plus data rows, all cells as strings.
struct RawTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column_count() const { return header.size(); }
  std::size_t column_index(const std::string& name) const;  // throws if absent
};

// RFC 4180 reader: UTF-8, first row is the header, quoted fields may contain
// commas, doubled quotes and line breaks. LF and CRLF are both accepted.
// Every record must have the same field count as the header.
RawTable read_csv(std::istream& in);
RawTable read_csv_file(const std::string& path);

// Writer quotes only when needed and ends records with LF.
void write_csv(std::ostream& out, const RawTable& table);
void write_csv_file(const std::string& path, const RawTable& table);

}  // namespace tabaudit
