#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace expcorr {

/// Items x participants table of behavioural measures with an explicit
/// missing-cell mask. Rows are items, columns are participants.
///
/// Immutable once built. Storage is column-major so that summing a
/// participant's column over all items is a contiguous scan, which is the
/// inner loop of permutation resampling. Absent cells store 0 in `values`
/// and are never read as data.
class DataTable {
 public:
  /// Builds a table from row-major `values`/`present` (size m*n) and
  /// validates it: m, n >= 2, every present value finite, and every row and
  /// column with at least one present cell. Label vectors are either empty
  /// or of size m (items) and n (participants). Throws DataError.
  static DataTable from_rows(std::size_t m, std::size_t n, std::span<const double> values,
                             std::span<const bool> present,
                             std::vector<std::string> item_labels = {},
                             std::vector<std::string> participant_labels = {});

  /// Complete table (no missing cells) from row-major values.
  static DataTable complete(std::size_t m, std::size_t n, std::span<const double> values);

  [[nodiscard]] std::size_t items() const noexcept { return m_; }
  [[nodiscard]] std::size_t participants() const noexcept { return n_; }
  [[nodiscard]] std::size_t present_count() const noexcept { return present_count_; }
  [[nodiscard]] bool is_complete() const noexcept { return present_count_ == m_ * n_; }

  [[nodiscard]] double value(std::size_t item, std::size_t participant) const noexcept {
    return values_[participant * m_ + item];
  }
  [[nodiscard]] bool present(std::size_t item, std::size_t participant) const noexcept {
    return present_[participant * m_ + item] != 0;
  }

  /// Column `participant` as a contiguous span over items (absent cells are 0).
  [[nodiscard]] std::span<const double> column(std::size_t participant) const noexcept {
    return {values_.data() + participant * m_, m_};
  }
  /// Presence mask of column `participant` (1 = present).
  [[nodiscard]] std::span<const unsigned char> column_mask(std::size_t participant) const noexcept {
    return {present_.data() + participant * m_, m_};
  }

  [[nodiscard]] const std::vector<std::string>& item_labels() const noexcept { return item_labels_; }
  [[nodiscard]] const std::vector<std::string>& participant_labels() const noexcept {
    return participant_labels_;
  }

  /// Returns a copy with every present cell replaced by f(item, participant, value).
  template <class F>
  [[nodiscard]] DataTable transformed(F&& f) const {
    DataTable out = *this;
    for (std::size_t j = 0; j < n_; ++j) {
      for (std::size_t i = 0; i < m_; ++i) {
        if (present(i, j)) out.values_[j * m_ + i] = f(i, j, value(i, j));
      }
    }
    return out;
  }

  /// Returns a copy with participants reordered: column j of the result is
  /// column order[j] of this table.
  [[nodiscard]] DataTable with_columns(std::span<const std::size_t> order) const;

  friend bool operator==(const DataTable&, const DataTable&) = default;

 private:
  DataTable() = default;

  std::size_t m_ = 0;
  std::size_t n_ = 0;
  std::size_t present_count_ = 0;
  std::vector<double> values_;
  std::vector<unsigned char> present_;
  std::vector<std::string> item_labels_;
  std::vector<std::string> participant_labels_;
};

/// Tri-state switch for header / label-column detection.
enum class Detect { automatic, yes, no };

struct LoadOptions {
  /// Numeric sentinel for missing cells; unset means only `NA` and empty
  /// fields are missing.
  std::optional<double> missing_code;
  /// Extra textual missing-cell token (for example "." or "-").
  std::optional<std::string> missing_token;
  /// Field delimiter; unset autodetects among ',', '\t', ';' (falling back to
  /// whitespace when none appears in the first line).
  std::optional<char> delimiter;
  Detect header = Detect::automatic;
  Detect row_labels = Detect::automatic;
};

/// Raw delimited-text grid, after delimiter detection and field trimming.
struct TextGrid {
  std::vector<std::vector<std::string>> rows;
  char delimiter = ',';  // ' ' when whitespace-separated
};

TextGrid read_delimited(std::istream& in, std::optional<char> delimiter = std::nullopt);

/// True when `field` is a missing-data token (`NA` or empty).
bool is_missing_token(std::string_view field);

/// Parses a finite real; std::nullopt for anything else.
std::optional<double> parse_real(std::string_view field);

/// Reads a delimited text table. Throws DataError with the offending
/// line/column (1-based) on ragged rows, non-numeric cells, fully missing
/// rows or columns, or fewer than 2 items or participants.
DataTable load_table(std::istream& in, const LoadOptions& options = {});
DataTable load_table_file(const std::string& path, const LoadOptions& options = {});

/// Writes `table` as delimited text. Labels are written when present
/// (a header row for participants, a first column for items); absent cells
/// are written as `NA`. Values use the shortest round-trip representation.
void write_table(std::ostream& out, const DataTable& table, char delimiter = ',');

/// Formats a double with the shortest representation that round-trips.
std::string format_real(double value);

/// Per-item means over present cells, with the present-cell counts.
struct ItemMeans {
  std::vector<double> means;
  std::vector<std::size_t> counts;
};

ItemMeans item_means(const DataTable& table);

/// Pearson product-moment correlation. Requires equal sizes >= 3; throws
/// DegenerateError when either vector has zero variance.
double pearson_r(std::span<const double> x, std::span<const double> y);

}  // namespace expcorr
