#include <cstdio>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "plurality/harness.hpp"

namespace plurality {

namespace {

const std::string kCsvHeader = "# plurality-results v" + std::to_string(kResultsVersion);

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool quoted = false;
  bool at_line_start = true;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char ch = text[i];
    if (at_line_start && ch == '#' && !quoted) {
      while (i < text.size() && text[i] != '\n') ++i;
      continue;
    }
    at_line_start = false;
    if (quoted) {
      if (ch == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += ch;
      }
      continue;
    }
    if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      record.push_back(std::move(field));
      field.clear();
    } else if (ch == '\n') {
      record.push_back(std::move(field));
      field.clear();
      records.push_back(std::move(record));
      record.clear();
      at_line_start = true;
    } else if (ch != '\r') {
      field += ch;
    }
  }
  if (quoted) throw std::runtime_error("unterminated quoted field");
  if (!field.empty() || !record.empty()) {
    record.push_back(std::move(field));
    records.push_back(std::move(record));
  }
  return records;
}

nlohmann::ordered_json typed(const std::string& value, ColumnKind kind) {
  if (value.empty()) return nullptr;
  switch (kind) {
    case ColumnKind::Int: return std::stoll(value);
    case ColumnKind::Float: return std::stod(value);
    case ColumnKind::Bool: return value == "true";
    case ColumnKind::Text: return value;
  }
  return value;
}

std::string untyped(const nlohmann::ordered_json& v, ColumnKind kind) {
  if (v.is_null()) return "";
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (kind == ColumnKind::Float) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.6f", v.get<double>());
    return buf;
  }
  return v.dump();
}

}  // namespace

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
  std::string out = "\"";
  for (const char ch : field) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

bool write_rows_csv(std::ostream& os, const std::vector<ResultsRow>& rows) {
  os << kCsvHeader << '\n';
  const auto& cols = results_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << cols[i].name;
  os << '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.values.size(); ++i) os << (i ? "," : "") << csv_escape(row.values[i]);
    os << '\n';
  }
  os.flush();
  return static_cast<bool>(os);
}

bool write_rows_json(std::ostream& os, const std::vector<ResultsRow>& rows) {
  const auto& cols = results_columns();
  auto doc = nlohmann::ordered_json::array();
  for (const auto& row : rows) {
    nlohmann::ordered_json obj;
    for (std::size_t i = 0; i < cols.size(); ++i) obj[cols[i].name] = typed(row.values[i], cols[i].kind);
    doc.push_back(std::move(obj));
  }
  os << doc.dump(2) << '\n';
  os.flush();
  return static_cast<bool>(os);
}

std::vector<ResultsRow> read_rows(const std::string& text) {
  const auto& cols = results_columns();
  std::vector<ResultsRow> rows;
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return rows;
  if (text[first] == '[') {
    const auto doc = nlohmann::ordered_json::parse(text);
    for (const auto& obj : doc) {
      ResultsRow row;
      for (const auto& col : cols) row.values.push_back(obj.contains(col.name) ? untyped(obj[col.name], col.kind) : "");
      rows.push_back(std::move(row));
    }
    return rows;
  }
  if (text.compare(first, kCsvHeader.size(), kCsvHeader) != 0 && text[first] == '#') {
    throw std::runtime_error("results file has an unsupported version header");
  }
  const auto records = parse_csv(text);
  if (records.empty()) return rows;
  const auto& header = records.front();
  std::vector<int> index(cols.size(), -1);
  for (std::size_t c = 0; c < cols.size(); ++c) {
    for (std::size_t h = 0; h < header.size(); ++h) {
      if (header[h] == cols[c].name) index[c] = static_cast<int>(h);
    }
  }
  for (std::size_t r = 1; r < records.size(); ++r) {
    if (records[r].size() == 1 && records[r][0].empty()) continue;
    if (records[r].size() != header.size()) {
      throw std::runtime_error("row " + std::to_string(r) + " has " + std::to_string(records[r].size()) +
                               " fields, header has " + std::to_string(header.size()));
    }
    ResultsRow row;
    for (std::size_t c = 0; c < cols.size(); ++c) row.values.push_back(index[c] < 0 ? "" : records[r][index[c]]);
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace plurality
