#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "kellylab/distribution.hpp"
#include "kellylab/history_table.hpp"

namespace kellylab {

/// A step table whose rows are conditional distributions.
class ConditionalKernel {
 public:
  ConditionalKernel() = default;
  ConditionalKernel(TableShape shape, Memory memory) : table_(shape, memory) {}

  static ConditionalKernel filled(TableShape shape, Memory memory,
                                  const HistoryTable::RowFiller& rows);

  /// Validates `probs` as a distribution before storing it.
  void set_row(std::uint64_t key, std::span<const double> probs);

  std::span<const double> row(std::span<const int> own, std::span<const int> other) const {
    return table_.row(own, other);
  }
  const HistoryTable& table() const { return table_; }
  std::size_t outcomes() const { return table_.width(); }

  friend bool operator==(const ConditionalKernel&, const ConditionalKernel&) = default;

 private:
  HistoryTable table_;
};

struct ModelDims {
  std::size_t y = 2;
  std::size_t x = 1;
};

/// Shape of P(y_i | y^{i-1}, x^i) at 0-based step i.
TableShape outcome_shape(ModelDims dims, std::size_t step);
/// Shape of P(x_i | x^{i-1}, y^{i-1}) at 0-based step i.
TableShape side_shape(ModelDims dims, std::size_t step);

/// Full causal law of n games: per-step outcome kernels P(y_i|y^{i-1},x^i)
/// and side-information kernels P(x_i|x^{i-1},y^{i-1}). A model without
/// side information uses the one-symbol x alphabet.
///
/// Step 1 uses the empty-history convention P(y_1|y^0, x^1) = P(y_1|x_1).
class ProcessModel {
 public:
  ProcessModel() = default;
  ProcessModel(std::size_t n, Alphabet y_alphabet, Alphabet x_alphabet,
               std::vector<ConditionalKernel> y_kernels, std::vector<ConditionalKernel> x_kernels);

  /// Same memory pattern and row rule at every step.
  static ProcessModel stationary(std::size_t n, Alphabet y_alphabet, Alphabet x_alphabet,
                                 Memory y_memory, const HistoryTable::RowFiller& y_rows,
                                 Memory x_memory, const HistoryTable::RowFiller& x_rows);
  static ProcessModel without_side_information(std::size_t n, Alphabet y_alphabet, Memory y_memory,
                                               const HistoryTable::RowFiller& y_rows);

  std::size_t n() const { return n_; }
  const Alphabet& y_alphabet() const { return y_alphabet_; }
  const Alphabet& x_alphabet() const { return x_alphabet_; }
  ModelDims dims() const { return {y_alphabet_.size(), x_alphabet_.size()}; }
  bool has_side_information() const { return x_alphabet_.size() > 1; }

  const ConditionalKernel& y_kernel(std::size_t step) const { return y_kernels_.at(step); }
  const ConditionalKernel& x_kernel(std::size_t step) const { return x_kernels_.at(step); }
  const std::vector<ConditionalKernel>& y_kernels() const { return y_kernels_; }
  const std::vector<ConditionalKernel>& x_kernels() const { return x_kernels_; }

  /// P(. | y^{step}, x^{step+1}); ys has length step, xs length step + 1.
  std::span<const double> outcome_row(std::size_t step, std::span<const int> ys,
                                      std::span<const int> xs) const;
  /// P(. | x^{step}, y^{step}); both histories have length step.
  std::span<const double> side_row(std::size_t step, std::span<const int> xs,
                                   std::span<const int> ys) const;

  /// Probability of the betting-time history (y^{i-1}, x^i) computed from the
  /// kernels; ys has length i - 1, xs length i.
  double history_probability(std::span<const int> ys, std::span<const int> xs) const;

  /// |X|^n |Y|^n, saturating at UINT64_MAX.
  std::uint64_t sequence_count() const;

  friend bool operator==(const ProcessModel&, const ProcessModel&) = default;

 private:
  std::size_t n_ = 0;
  Alphabet y_alphabet_;
  Alphabet x_alphabet_;
  std::vector<ConditionalKernel> y_kernels_;
  std::vector<ConditionalKernel> x_kernels_;
};

}  // namespace kellylab
