#include "expcorr/data_table.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <memory>
#include <ostream>
#include <sstream>

#include "expcorr/error.hpp"

namespace expcorr {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
  return s;
}

std::vector<std::string> split_fields(std::string_view line, char delimiter) {
  std::vector<std::string> fields;
  if (delimiter == ' ') {
    std::size_t pos = 0;
    while (pos < line.size()) {
      while (pos < line.size() && (line[pos] == ' ' || line[pos] == '\t' || line[pos] == '\r')) ++pos;
      if (pos >= line.size()) break;
      std::size_t end = pos;
      while (end < line.size() && line[end] != ' ' && line[end] != '\t' && line[end] != '\r') ++end;
      fields.emplace_back(trim(line.substr(pos, end - pos)));
      pos = end;
    }
    return fields;
  }
  std::size_t start = 0;
  for (;;) {
    const std::size_t end = line.find(delimiter, start);
    fields.emplace_back(trim(line.substr(start, end == std::string_view::npos ? end : end - start)));
    if (end == std::string_view::npos) break;
    start = end + 1;
  }
  return fields;
}

char detect_delimiter(std::string_view first_line) {
  char best = ' ';
  std::ptrdiff_t best_count = 0;
  for (char c : {',', '\t', ';'}) {
    const auto count = std::count(first_line.begin(), first_line.end(), c);
    if (count > best_count) {
      best = c;
      best_count = count;
    }
  }
  return best;
}

std::string location(std::size_t line, std::size_t column) {
  return "line " + std::to_string(line) + ", column " + std::to_string(column);
}

}  // namespace

bool is_missing_token(std::string_view field) { return field.empty() || field == "NA"; }

std::optional<double> parse_real(std::string_view field) {
  if (!field.empty() && field.front() == '+') field.remove_prefix(1);
  double value = 0.0;
  const auto* end = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(field.data(), end, value);
  if (ec != std::errc{} || ptr != end || !std::isfinite(value)) return std::nullopt;
  return value;
}

TextGrid read_delimited(std::istream& in, std::optional<char> delimiter) {
  TextGrid grid;
  std::string line;
  std::vector<std::string> lines;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
  }
  while (!lines.empty() && trim(lines.back()).empty()) lines.pop_back();
  if (lines.empty()) return grid;
  // Strip a UTF-8 byte order mark.
  if (lines.front().rfind("\xEF\xBB\xBF", 0) == 0) lines.front().erase(0, 3);
  grid.delimiter = delimiter.value_or(detect_delimiter(lines.front()));
  grid.rows.reserve(lines.size());
  for (const auto& l : lines) grid.rows.push_back(split_fields(l, grid.delimiter));
  return grid;
}

DataTable DataTable::from_rows(std::size_t m, std::size_t n, std::span<const double> values,
                               std::span<const bool> present, std::vector<std::string> item_labels,
                               std::vector<std::string> participant_labels) {
  if (m < 2 || n < 2) {
    throw DataError("table needs at least 2 items and 2 participants, got " + std::to_string(m) +
                    "x" + std::to_string(n));
  }
  if (values.size() != m * n || present.size() != m * n) {
    throw DataError("table storage does not match its " + std::to_string(m) + "x" +
                    std::to_string(n) + " shape");
  }
  if (!item_labels.empty() && item_labels.size() != m) throw DataError("item label count mismatch");
  if (!participant_labels.empty() && participant_labels.size() != n) {
    throw DataError("participant label count mismatch");
  }
  DataTable t;
  t.m_ = m;
  t.n_ = n;
  t.values_.assign(m * n, 0.0);
  t.present_.assign(m * n, 0);
  std::vector<std::size_t> row_counts(m, 0);
  std::vector<std::size_t> col_counts(n, 0);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (!present[i * n + j]) continue;
      const double v = values[i * n + j];
      if (!std::isfinite(v)) {
        throw DataError("non-finite value at item " + std::to_string(i + 1) + ", participant " +
                        std::to_string(j + 1));
      }
      t.values_[j * m + i] = v;
      t.present_[j * m + i] = 1;
      ++row_counts[i];
      ++col_counts[j];
      ++t.present_count_;
    }
  }
  for (std::size_t i = 0; i < m; ++i) {
    if (row_counts[i] == 0) throw DataError("item row " + std::to_string(i + 1) + " is entirely missing");
  }
  for (std::size_t j = 0; j < n; ++j) {
    if (col_counts[j] == 0) {
      throw DataError("participant column " + std::to_string(j + 1) + " is entirely missing");
    }
  }
  t.item_labels_ = std::move(item_labels);
  t.participant_labels_ = std::move(participant_labels);
  return t;
}

DataTable DataTable::complete(std::size_t m, std::size_t n, std::span<const double> values) {
  // std::vector<bool> has no contiguous storage.
  const std::unique_ptr<bool[]> present(new bool[m * n]);
  std::fill_n(present.get(), m * n, true);
  return from_rows(m, n, values, std::span<const bool>(present.get(), m * n));
}

DataTable DataTable::with_columns(std::span<const std::size_t> order) const {
  if (order.size() != n_) throw DataError("column permutation has the wrong length");
  DataTable out = *this;
  std::vector<bool> seen(n_, false);
  for (std::size_t j = 0; j < n_; ++j) {
    const std::size_t src = order[j];
    if (src >= n_ || seen[src]) throw DataError("column order is not a permutation");
    seen[src] = true;
    std::copy_n(values_.begin() + static_cast<std::ptrdiff_t>(src * m_), m_,
                out.values_.begin() + static_cast<std::ptrdiff_t>(j * m_));
    std::copy_n(present_.begin() + static_cast<std::ptrdiff_t>(src * m_), m_,
                out.present_.begin() + static_cast<std::ptrdiff_t>(j * m_));
    if (!participant_labels_.empty()) out.participant_labels_[j] = participant_labels_[src];
  }
  return out;
}

DataTable load_table(std::istream& in, const LoadOptions& options) {
  TextGrid grid = read_delimited(in, options.delimiter);
  auto& rows = grid.rows;
  if (rows.empty()) throw DataError("table is empty");

  auto missing = [&](const std::string& field) {
    return is_missing_token(field) ||
           (options.missing_token && !options.missing_token->empty() && field == *options.missing_token);
  };
  auto numeric_or_missing = [&](const std::string& field) {
    return missing(field) || parse_real(field).has_value();
  };

  bool labels = options.row_labels == Detect::yes;
  if (options.row_labels == Detect::automatic) {
    for (std::size_t r = 1; r < rows.size() && !labels; ++r) {
      if (!rows[r].empty() && !numeric_or_missing(rows[r][0])) labels = true;
    }
    if (rows.size() == 1 && !rows[0].empty() && !numeric_or_missing(rows[0][0])) labels = true;
  }
  bool header = options.header == Detect::yes;
  if (options.header == Detect::automatic) {
    for (std::size_t c = labels ? 1 : 0; c < rows[0].size() && !header; ++c) {
      if (!numeric_or_missing(rows[0][c])) header = true;
    }
  }

  const std::size_t first_row = header ? 1 : 0;
  const std::size_t first_col = labels ? 1 : 0;
  const std::size_t width = rows[first_row < rows.size() ? first_row : 0].size();
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != width) {
      throw DataError("ragged table: line " + std::to_string(r + 1) + " has " +
                      std::to_string(rows[r].size()) + " fields, expected " + std::to_string(width));
    }
  }
  if (width <= first_col) throw DataError("table has no data columns");
  const std::size_t m = rows.size() - first_row;
  const std::size_t n = width - first_col;
  if (m < 2 || n < 2) {
    throw DataError("table needs at least 2 items and 2 participants, got " + std::to_string(m) +
                    "x" + std::to_string(n));
  }

  std::vector<double> values(m * n, 0.0);
  const std::unique_ptr<bool[]> present(new bool[m * n]);
  std::vector<std::string> item_labels;
  std::vector<std::string> participant_labels;
  if (labels) item_labels.reserve(m);
  if (header) participant_labels.assign(rows[0].begin() + static_cast<std::ptrdiff_t>(first_col), rows[0].end());

  for (std::size_t i = 0; i < m; ++i) {
    const auto& row = rows[first_row + i];
    if (labels) item_labels.push_back(row[0]);
    for (std::size_t j = 0; j < n; ++j) {
      const std::string& field = row[first_col + j];
      present[i * n + j] = false;
      if (missing(field)) continue;
      const auto v = parse_real(field);
      if (!v) {
        throw DataError("non-numeric cell '" + field + "' at " +
                        location(first_row + i + 1, first_col + j + 1));
      }
      if (options.missing_code && *v == *options.missing_code) continue;
      values[i * n + j] = *v;
      present[i * n + j] = true;
    }
  }
  return DataTable::from_rows(m, n, values, std::span<const bool>(present.get(), m * n),
                              std::move(item_labels), std::move(participant_labels));
}

DataTable load_table_file(const std::string& path, const LoadOptions& options) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open table file '" + path + "'");
  try {
    return load_table(in, options);
  } catch (const DataError& e) {
    throw DataError(path + ": " + e.what());
  }
}

std::string format_real(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return {buf, ptr};
}

void write_table(std::ostream& out, const DataTable& table, char delimiter) {
  const bool labels = !table.item_labels().empty();
  const auto& plabels = table.participant_labels();
  if (!plabels.empty()) {
    if (labels) out << "item" << delimiter;
    for (std::size_t j = 0; j < plabels.size(); ++j) {
      if (j) out << delimiter;
      out << plabels[j];
    }
    out << '\n';
  }
  for (std::size_t i = 0; i < table.items(); ++i) {
    if (labels) out << table.item_labels()[i] << delimiter;
    for (std::size_t j = 0; j < table.participants(); ++j) {
      if (j) out << delimiter;
      if (table.present(i, j)) {
        out << format_real(table.value(i, j));
      } else {
        out << "NA";
      }
    }
    out << '\n';
  }
}

ItemMeans item_means(const DataTable& table) {
  const std::size_t m = table.items();
  ItemMeans result{std::vector<double>(m, 0.0), std::vector<std::size_t>(m, 0)};
  for (std::size_t j = 0; j < table.participants(); ++j) {
    const auto col = table.column(j);
    const auto mask = table.column_mask(j);
    for (std::size_t i = 0; i < m; ++i) {
      if (mask[i]) {
        result.means[i] += col[i];
        ++result.counts[i];
      }
    }
  }
  for (std::size_t i = 0; i < m; ++i) result.means[i] /= static_cast<double>(result.counts[i]);
  return result;
}

double pearson_r(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw DomainError("pearson_r: vectors differ in length");
  const std::size_t m = x.size();
  if (m < 3) throw DomainError("pearson_r: need at least 3 paired values");
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(m);
  my /= static_cast<double>(m);
  double sxx = 0.0;
  double syy = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  if (!(sxx > 0.0) || !(syy > 0.0)) throw DegenerateError("pearson_r: zero-variance input");
  const double r = sxy / std::sqrt(sxx * syy);
  return std::clamp(r, -1.0, 1.0);
}

}  // namespace expcorr
