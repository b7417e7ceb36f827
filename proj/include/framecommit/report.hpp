#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "framecommit/probability.hpp"

namespace framecommit {

/// Ordered "key: value" record. Keys appear in insertion order, so two runs
/// that add the same fields produce byte-identical text.
class Report {
 public:
  void add(std::string key, std::string value);
  void add(std::string key, const char* value) { add(std::move(key), std::string(value)); }
  void add(std::string key, double value);
  void add(std::string key, std::int64_t value);
  void add(std::string key, int value) { add(std::move(key), static_cast<std::int64_t>(value)); }
  void add(std::string key, std::uint64_t value);
  void add(std::string key, bool value);
  void add(std::string key, const Probability& value);

  /// Blank-line separated "[name]" section header.
  void section(const std::string& name);

  const std::vector<std::pair<std::string, std::string>>& entries() const { return entries_; }

  /// Value of the first entry with this key, or empty.
  std::string find(const std::string& key) const;

  void write(std::ostream& os) const;
  std::string str() const;

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
};

/// Delimiter-separated table with a header row.
class Table {
 public:
  explicit Table(std::vector<std::string> columns, char delimiter = ',')
      : columns_(std::move(columns)), delimiter_(delimiter) {}

  void add_row(std::vector<std::string> row);
  std::size_t rows() const { return rows_.size(); }
  void write(std::ostream& os) const;

 private:
  std::vector<std::string> columns_;
  std::vector<std::vector<std::string>> rows_;
  char delimiter_;
};

}  // namespace framecommit
