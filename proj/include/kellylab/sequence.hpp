#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "kellylab/distribution.hpp"
#include "kellylab/process_model.hpp"

namespace kellylab {

inline constexpr std::uint64_t kDefaultEnumerationCap = 10'000'000;
inline constexpr double kNormalizationTolerance = 1e-10;

struct EnumerationOptions {
  std::uint64_t cap = kDefaultEnumerationCap;
};

/// Exhaustive table of P(x^n, y^n).
///
/// Sequences are indexed in causal order: the mixed-radix digits are
/// x_1, y_1, x_2, y_2, ..., x_n, y_n with x_1 most significant, so every
/// causal prefix (x^i, y^{i-1}) or (x^i, y^i) is a contiguous block.
class SequenceDistribution {
 public:
  SequenceDistribution() = default;
  SequenceDistribution(std::size_t n, Alphabet y_alphabet, Alphabet x_alphabet,
                       std::vector<double> probs);

  std::size_t n() const { return n_; }
  const Alphabet& y_alphabet() const { return y_alphabet_; }
  const Alphabet& x_alphabet() const { return x_alphabet_; }
  std::uint64_t size() const { return probs_.size(); }
  std::span<const double> probs() const { return probs_; }
  double prob(std::uint64_t index) const { return probs_[index]; }

  /// Base of digit v: v = 2(i-1) is x_i, v = 2(i-1)+1 is y_i.
  std::size_t base(std::size_t variable) const {
    return variable % 2 == 0 ? x_alphabet_.size() : y_alphabet_.size();
  }
  std::size_t variables() const { return 2 * n_; }

  void decode(std::uint64_t index, std::span<int> xs, std::span<int> ys) const;
  std::uint64_t encode(std::span<const int> xs, std::span<const int> ys) const;
  /// Interleaved digits (x_1, y_1, ..., x_n, y_n).
  void digits(std::uint64_t index, std::span<int> out) const;

 private:
  std::size_t n_ = 0;
  Alphabet y_alphabet_;
  Alphabet x_alphabet_;
  std::vector<double> probs_;
};

/// P(x^n, y^n) = prod_i P(x_i|x^{i-1},y^{i-1}) P(y_i|y^{i-1},x^i), accumulated
/// in the log domain. Throws EnumerationTooLarge above options.cap sequences.
SequenceDistribution joint_sequence(const ProcessModel& model, const EnumerationOptions& options = {});

/// Marginal over the variables with keep[v] set (digit numbering as in
/// SequenceDistribution::base). Indexed by the kept digits in order.
std::vector<double> marginal(const SequenceDistribution& joint, const std::vector<bool>& keep);

/// Index into a marginal table for a sequence given by its interleaved digits.
std::uint64_t project(const SequenceDistribution& joint, std::span<const int> digits,
                      const std::vector<bool>& keep);

/// P(y^n) as a table over y^n (y_1 most significant).
std::vector<double> outcome_marginal(const SequenceDistribution& joint);
/// Index of y^n in the outcome_marginal table.
std::uint64_t outcome_index(std::span<const int> ys, std::size_t y_size);

enum class Direction {
  x_given_y,  ///< P(x^n || y^{n-d}) = prod_i P(x_i | x^{i-1}, y^{i-d})
  y_given_x,  ///< P(y^n || x^{n-d}) = prod_i P(y_i | y^{i-1}, x^{i-d})
};

/// ln of the causal factor for every sequence, derived from the joint table
/// alone by marginalization. Entries off the support are NaN.
std::vector<double> log_causal_factor(const SequenceDistribution& joint, Direction direction,
                                      int delay);
/// Same as log_causal_factor, exponentiated.
std::vector<double> causal_factor(const SequenceDistribution& joint, Direction direction, int delay);

/// Causal factor of one sequence. Throws UndefinedConditional naming the
/// prefix when a conditioning event has zero probability.
double causal_factor(const SequenceDistribution& joint, Direction direction, int delay,
                     std::span<const int> xs, std::span<const int> ys);

}  // namespace kellylab
