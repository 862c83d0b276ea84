#include "tabaudit/csv.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "tabaudit/error.hpp"

namespace tabaudit {

std::size_t RawTable::column_index(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) {
      return i;
    }
  }
  throw Error("csv: no column named '" + name + "'");
}

namespace {

enum class State { FieldStart, Unquoted, Quoted, QuoteInQuoted };

[[noreturn]] void parse_error(std::size_t record, const std::string& what) {
  throw Error("csv: record " + std::to_string(record) + ": " + what);
}

}  // namespace

RawTable read_csv(std::istream& in) {
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());

  std::vector<std::vector<std::string>> records;
  std::vector<std::string> fields;
  std::string field;
  State state = State::FieldStart;
  std::size_t record_no = 1;

  auto end_field = [&] {
    fields.push_back(std::move(field));
    field.clear();
  };
  auto end_record = [&] {
    end_field();
    records.push_back(std::move(fields));
    fields.clear();
    ++record_no;
    state = State::FieldStart;
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    // Normalize CRLF outside quoted fields.
    if (c == '\r' && state != State::Quoted) {
      if (i + 1 < text.size() && text[i + 1] == '\n') {
        continue;
      }
      parse_error(record_no, "stray carriage return");
    }
    switch (state) {
      case State::FieldStart:
        if (c == '"') {
          state = State::Quoted;
        } else if (c == ',') {
          end_field();
        } else if (c == '\n') {
          end_record();
        } else {
          field.push_back(c);
          state = State::Unquoted;
        }
        break;
      case State::Unquoted:
        if (c == ',') {
          end_field();
          state = State::FieldStart;
        } else if (c == '\n') {
          end_record();
        } else if (c == '"') {
          parse_error(record_no, "quote inside unquoted field");
        } else {
          field.push_back(c);
        }
        break;
      case State::Quoted:
        if (c == '"') {
          state = State::QuoteInQuoted;
        } else {
          field.push_back(c);
        }
        break;
      case State::QuoteInQuoted:
        if (c == '"') {
          field.push_back('"');
          state = State::Quoted;
        } else if (c == ',') {
          end_field();
          state = State::FieldStart;
        } else if (c == '\n') {
          end_record();
        } else {
          parse_error(record_no, "unexpected character after closing quote");
        }
        break;
    }
  }
  if (state == State::Quoted) {
    parse_error(record_no, "unterminated quoted field");
  }
  // Final record without a trailing newline.
  if (state != State::FieldStart || !fields.empty()) {
    end_record();
  }

  if (records.empty()) {
    throw Error("csv: empty table");
  }
  RawTable table;
  table.header = std::move(records.front());
  for (std::size_t r = 1; r < records.size(); ++r) {
    if (records[r].size() != table.header.size()) {
      parse_error(r + 1, "expected " + std::to_string(table.header.size()) +
                             " fields, got " +
                             std::to_string(records[r].size()));
    }
    table.rows.push_back(std::move(records[r]));
  }
  return table;
}

RawTable read_csv_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error("cannot open csv file '" + path + "'");
  }
  try {
    return read_csv(in);
  } catch (const Error& e) {
    throw Error(path + ": " + e.what());
  }
}

namespace {

void write_field(std::ostream& out, const std::string& field) {
  if (field.find_first_of(",\"\n\r") == std::string::npos) {
    out << field;
    return;
  }
  out << '"';
  for (char c : field) {
    if (c == '"') {
      out << '"';
    }
    out << c;
  }
  out << '"';
}

void write_record(std::ostream& out, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i > 0) {
      out << ',';
    }
    write_field(out, fields[i]);
  }
  out << '\n';
}

}  // namespace

void write_csv(std::ostream& out, const RawTable& table) {
  write_record(out, table.header);
  for (const auto& row : table.rows) {
    write_record(out, row);
  }
}

void write_csv_file(const std::string& path, const RawTable& table) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error("cannot write csv file '" + path + "'");
  }
  write_csv(out, table);
}

}  // namespace tabaudit
