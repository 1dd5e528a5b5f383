#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace kellylab {

inline constexpr int kFullHistory = -1;

/// How far back a step-table looks into its own sequence and into the other
/// sequence. kFullHistory means the whole available history.
struct Memory {
  int own = kFullHistory;
  int other = kFullHistory;

  static Memory full() { return {}; }
  static Memory markov(int own_order, int other_order) { return {own_order, other_order}; }
  bool finite() const { return own != kFullHistory && other != kFullHistory; }

  friend bool operator==(const Memory&, const Memory&) = default;
};

/// Dimensions of the histories visible at one step.
///
/// For an outcome kernel at 0-based step i the own history is y^{i} (length
/// i) and the other history is x^{i+1} (length i + 1); a side-information
/// kernel sees x^{i} and y^{i}.
struct TableShape {
  std::size_t own_base = 1;
  std::size_t own_available = 0;
  std::size_t other_base = 1;
  std::size_t other_available = 0;
  std::size_t width = 1;

  friend bool operator==(const TableShape&, const TableShape&) = default;
};

/// Rows of `width` doubles for one step, keyed by the trailing windows of two
/// histories. Finite-memory tables are stored densely; anything with a
/// full-history component is stored sparsely, keyed by the encoded prefix.
///
/// The key is the mixed-radix code of the own window (oldest symbol most
/// significant) followed by the other window.
class HistoryTable {
 public:
  using RowFiller = std::function<void(std::span<const int> own_window,
                                       std::span<const int> other_window, std::span<double> row)>;

  HistoryTable() = default;
  HistoryTable(TableShape shape, Memory memory);

  const TableShape& shape() const { return shape_; }
  const Memory& memory() const { return memory_; }
  std::size_t width() const { return shape_.width; }
  std::size_t own_window() const { return own_window_; }
  std::size_t other_window() const { return other_window_; }
  bool sparse() const { return !memory_.finite(); }
  std::uint64_t key_space() const { return key_space_; }

  /// Key from full histories; only the trailing windows are read.
  std::uint64_t key(std::span<const int> own, std::span<const int> other) const;
  std::uint64_t window_key(std::span<const int> own_window, std::span<const int> other_window) const;
  void decode(std::uint64_t key, std::vector<int>& own_window, std::vector<int>& other_window) const;

  /// nullptr when the row was never set.
  const double* find(std::uint64_t key) const;
  /// Throws UndefinedConditional when the row was never set.
  std::span<const double> row(std::uint64_t key) const;
  std::span<const double> row(std::span<const int> own, std::span<const int> other) const {
    return row(key(own, other));
  }

  void set_row(std::uint64_t key, std::span<const double> values);
  /// Sets every row of the key space.
  void fill(const RowFiller& filler);

  std::size_t populated_rows() const;

  /// Visits populated rows in ascending key order.
  void for_each_row(const std::function<void(std::uint64_t, std::span<const double>)>& visit) const;

  /// Human-readable history key, e.g. "0,1|2", using the given label sets.
  std::string key_string(std::uint64_t key, const std::vector<std::string>& own_labels,
                         const std::vector<std::string>& other_labels) const;
  std::uint64_t parse_key_string(const std::string& text, const std::vector<std::string>& own_labels,
                                 const std::vector<std::string>& other_labels) const;

  friend bool operator==(const HistoryTable& a, const HistoryTable& b);

 private:
  TableShape shape_;
  Memory memory_;
  std::size_t own_window_ = 0;
  std::size_t other_window_ = 0;
  std::uint64_t other_span_ = 1;  // other_base^other_window
  std::uint64_t key_space_ = 1;
  std::vector<double> dense_;
  std::vector<char> present_;
  std::map<std::uint64_t, std::vector<double>> sparse_;
};

}  // namespace kellylab
