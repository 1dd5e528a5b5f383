#include "kellylab/history_table.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "kellylab/error.hpp"

namespace kellylab {
namespace {

constexpr std::uint64_t kMaxDenseRows = std::uint64_t{1} << 26;

std::size_t window_length(int order, std::size_t available) {
  if (order == kFullHistory) return available;
  if (order < 0) throw InvalidParameter("memory order must be >= 0 or full");
  return std::min<std::size_t>(static_cast<std::size_t>(order), available);
}

std::uint64_t checked_power(std::size_t base, std::size_t exponent) {
  std::uint64_t result = 1;
  for (std::size_t i = 0; i < exponent; ++i) {
    if (result > std::numeric_limits<std::uint64_t>::max() / base) {
      throw InvalidModel("history table key space overflows 64 bits");
    }
    result *= base;
  }
  return result;
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  if (text.empty()) return parts;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, sep)) parts.push_back(item);
  if (text.back() == sep) parts.emplace_back();
  return parts;
}

int symbol_index(const std::vector<std::string>& labels, const std::string& label) {
  auto it = std::find(labels.begin(), labels.end(), label);
  if (it == labels.end()) throw SchemaError("unknown symbol '" + label + "' in history key");
  return static_cast<int>(it - labels.begin());
}

}  // namespace

HistoryTable::HistoryTable(TableShape shape, Memory memory) : shape_(shape), memory_(memory) {
  if (shape_.own_base == 0 || shape_.other_base == 0 || shape_.width == 0) {
    throw InvalidParameter("history table bases and width must be positive");
  }
  own_window_ = window_length(memory_.own, shape_.own_available);
  other_window_ = window_length(memory_.other, shape_.other_available);
  other_span_ = checked_power(shape_.other_base, other_window_);
  const std::uint64_t own_span = checked_power(shape_.own_base, own_window_);
  if (own_span > std::numeric_limits<std::uint64_t>::max() / other_span_) {
    throw InvalidModel("history table key space overflows 64 bits");
  }
  key_space_ = own_span * other_span_;
  if (!sparse()) {
    if (key_space_ > kMaxDenseRows) throw InvalidModel("dense history table too large");
    dense_.assign(key_space_ * shape_.width, 0.0);
    present_.assign(key_space_, 0);
  }
}

std::uint64_t HistoryTable::window_key(std::span<const int> own_window,
                                       std::span<const int> other_window) const {
  std::uint64_t own_code = 0;
  for (int s : own_window) {
    own_code = own_code * shape_.own_base + static_cast<std::uint64_t>(s);
  }
  std::uint64_t other_code = 0;
  for (int s : other_window) {
    other_code = other_code * shape_.other_base + static_cast<std::uint64_t>(s);
  }
  return own_code * other_span_ + other_code;
}

std::uint64_t HistoryTable::key(std::span<const int> own, std::span<const int> other) const {
  if (own.size() != shape_.own_available || other.size() != shape_.other_available) {
    throw InvalidParameter("history length does not match the table's step");
  }
  return window_key(own.subspan(own.size() - own_window_),
                    other.subspan(other.size() - other_window_));
}

void HistoryTable::decode(std::uint64_t key, std::vector<int>& own_window,
                          std::vector<int>& other_window) const {
  own_window.assign(own_window_, 0);
  other_window.assign(other_window_, 0);
  std::uint64_t other_code = key % other_span_;
  std::uint64_t own_code = key / other_span_;
  for (std::size_t i = other_window_; i-- > 0;) {
    other_window[i] = static_cast<int>(other_code % shape_.other_base);
    other_code /= shape_.other_base;
  }
  for (std::size_t i = own_window_; i-- > 0;) {
    own_window[i] = static_cast<int>(own_code % shape_.own_base);
    own_code /= shape_.own_base;
  }
}

const double* HistoryTable::find(std::uint64_t key) const {
  if (sparse()) {
    auto it = sparse_.find(key);
    return it == sparse_.end() ? nullptr : it->second.data();
  }
  if (key >= key_space_ || !present_[key]) return nullptr;
  return dense_.data() + key * shape_.width;
}

std::span<const double> HistoryTable::row(std::uint64_t key) const {
  const double* data = find(key);
  if (data == nullptr) {
    throw UndefinedConditional("no row recorded for history key " + std::to_string(key));
  }
  return {data, shape_.width};
}

void HistoryTable::set_row(std::uint64_t key, std::span<const double> values) {
  if (key >= key_space_) throw InvalidParameter("history key out of range");
  if (values.size() != shape_.width) throw InvalidParameter("row width mismatch");
  if (sparse()) {
    sparse_[key].assign(values.begin(), values.end());
    return;
  }
  std::copy(values.begin(), values.end(), dense_.begin() + static_cast<std::ptrdiff_t>(key * shape_.width));
  present_[key] = 1;
}

void HistoryTable::fill(const RowFiller& filler) {
  std::vector<int> own;
  std::vector<int> other;
  std::vector<double> row(shape_.width);
  for (std::uint64_t key = 0; key < key_space_; ++key) {
    decode(key, own, other);
    std::fill(row.begin(), row.end(), 0.0);
    filler(own, other, row);
    set_row(key, row);
  }
}

std::size_t HistoryTable::populated_rows() const {
  if (sparse()) return sparse_.size();
  return static_cast<std::size_t>(std::count(present_.begin(), present_.end(), 1));
}

void HistoryTable::for_each_row(
    const std::function<void(std::uint64_t, std::span<const double>)>& visit) const {
  if (sparse()) {
    for (const auto& [key, values] : sparse_) visit(key, values);
    return;
  }
  for (std::uint64_t key = 0; key < key_space_; ++key) {
    if (present_[key]) visit(key, {dense_.data() + key * shape_.width, shape_.width});
  }
}

std::string HistoryTable::key_string(std::uint64_t key, const std::vector<std::string>& own_labels,
                                     const std::vector<std::string>& other_labels) const {
  std::vector<int> own;
  std::vector<int> other;
  decode(key, own, other);
  std::string out;
  for (std::size_t i = 0; i < own.size(); ++i) {
    if (i > 0) out += ',';
    out += own_labels.at(static_cast<std::size_t>(own[i]));
  }
  out += '|';
  for (std::size_t i = 0; i < other.size(); ++i) {
    if (i > 0) out += ',';
    out += other_labels.at(static_cast<std::size_t>(other[i]));
  }
  return out;
}

std::uint64_t HistoryTable::parse_key_string(const std::string& text,
                                             const std::vector<std::string>& own_labels,
                                             const std::vector<std::string>& other_labels) const {
  const auto bar = text.find('|');
  if (bar == std::string::npos || text.find('|', bar + 1) != std::string::npos) {
    throw SchemaError("history key '" + text + "' must contain exactly one '|'");
  }
  const auto own_parts = split(text.substr(0, bar), ',');
  const auto other_parts = split(text.substr(bar + 1), ',');
  if (own_parts.size() != own_window_ || other_parts.size() != other_window_) {
    throw SchemaError("history key '" + text + "' has the wrong window lengths (expected " +
                      std::to_string(own_window_) + "|" + std::to_string(other_window_) + ")");
  }
  std::vector<int> own;
  std::vector<int> other;
  for (const auto& p : own_parts) own.push_back(symbol_index(own_labels, p));
  for (const auto& p : other_parts) other.push_back(symbol_index(other_labels, p));
  return window_key(own, other);
}

bool operator==(const HistoryTable& a, const HistoryTable& b) {
  if (!(a.shape_ == b.shape_) || !(a.memory_ == b.memory_)) return false;
  if (a.sparse()) return a.sparse_ == b.sparse_;
  return a.present_ == b.present_ && a.dense_ == b.dense_;
}

}  // namespace kellylab
