#include "framecommit/report.hpp"

#include <sstream>

#include "framecommit/errors.hpp"

namespace framecommit {

void Report::add(std::string key, std::string value) {
  entries_.emplace_back(std::move(key), std::move(value));
}

void Report::add(std::string key, double value) { add(std::move(key), to_decimal_string(value)); }

void Report::add(std::string key, std::int64_t value) { add(std::move(key), std::to_string(value)); }

void Report::add(std::string key, std::uint64_t value) { add(std::move(key), std::to_string(value)); }

void Report::add(std::string key, bool value) {
  add(std::move(key), std::string(value ? "true" : "false"));
}

void Report::add(std::string key, const Probability& value) {
  add(std::move(key), to_report_string(value));
}

void Report::section(const std::string& name) { entries_.emplace_back("[" + name + "]", ""); }

std::string Report::find(const std::string& key) const {
  for (const auto& [k, v] : entries_) {
    if (k == key) return v;
  }
  return {};
}

void Report::write(std::ostream& os) const {
  for (const auto& [k, v] : entries_) {
    if (!k.empty() && k.front() == '[') {
      os << '\n' << k << '\n';
    } else {
      os << k << ": " << v << '\n';
    }
  }
}

std::string Report::str() const {
  std::ostringstream os;
  write(os);
  return os.str();
}

void Table::add_row(std::vector<std::string> row) {
  if (row.size() != columns_.size()) throw InvalidArgument("table row has the wrong number of cells");
  rows_.push_back(std::move(row));
}

void Table::write(std::ostream& os) const {
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) os << delimiter_;
      os << cells[i];
    }
    os << '\n';
  };
  line(columns_);
  for (const auto& r : rows_) line(r);
}

}  // namespace framecommit
