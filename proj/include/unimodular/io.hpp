#pragma once

// RFC-4180 CSV output. Doubles are written with 17 significant digits so
// that they round-trip exactly.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "unimodular/errors.hpp"

namespace unimodular::io {

inline std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline std::string quote(const std::string& field) {
  if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

  class Row {
   public:
    Row& operator<<(double x) { return add(format_double(x)); }
    Row& operator<<(std::int64_t x) { return add(std::to_string(x)); }
    Row& operator<<(int x) { return add(std::to_string(x)); }
    Row& operator<<(std::uint64_t x) { return add(std::to_string(x)); }
    Row& operator<<(const std::string& s) { return add(s); }
    Row& operator<<(const char* s) { return add(s); }

   private:
    friend class CsvTable;
    explicit Row(std::vector<std::string>& cells) : cells_(cells) {}
    Row& add(std::string s) {
      cells_.push_back(std::move(s));
      return *this;
    }
    std::vector<std::string>& cells_;
  };

  Row row() {
    rows_.emplace_back();
    return Row(rows_.back());
  }

  std::size_t size() const { return rows_.size(); }

  void write(std::ostream& os) const {
    write_line(os, header_);
    for (const auto& r : rows_) {
      require(r.size() == header_.size(), "CsvTable: row width does not match header");
      write_line(os, r);
    }
  }

  std::string str() const {
    std::ostringstream os;
    write(os);
    return os.str();
  }

  void write_file(const std::string& path) const {
    std::ofstream f(path, std::ios::binary);
    require(static_cast<bool>(f), "CsvTable: cannot open " + path);
    write(f);
  }

 private:
  static void write_line(std::ostream& os, const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) os << ',';
      os << quote(cells[i]);
    }
    os << "\r\n";
  }

  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

}  // namespace unimodular::io
