#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace kellylab {

/// Ordered set of symbol labels; symbol i is addressed by its canonical index.
///
/// Labels must be nonempty, distinct, and free of ',' and '|' (reserved by
/// the history-key syntax of the JSON schema).
class Alphabet {
 public:
  Alphabet() = default;
  explicit Alphabet(std::vector<std::string> labels);

  /// One-symbol alphabet standing in for "no side information".
  static Alphabet trivial();
  /// Labels "0", "1", ..., "k-1".
  static Alphabet indexed(std::size_t k);

  std::size_t size() const { return labels_.size(); }
  const std::string& label(std::size_t i) const { return labels_.at(i); }
  const std::vector<std::string>& labels() const { return labels_; }
  std::size_t index_of(std::string_view label) const;

  friend bool operator==(const Alphabet&, const Alphabet&) = default;

 private:
  std::vector<std::string> labels_;
};

inline constexpr double kDistributionTolerance = 1e-12;

/// Probability vector over an alphabet: entries >= 0 summing to 1 within
/// kDistributionTolerance.
class Distribution {
 public:
  Distribution() = default;
  explicit Distribution(std::vector<double> probs);

  static Distribution uniform(std::size_t k);
  static Distribution point_mass(std::size_t k, std::size_t at);

  std::size_t size() const { return probs_.size(); }
  double operator[](std::size_t i) const { return probs_[i]; }
  std::span<const double> probs() const { return probs_; }

 private:
  std::vector<double> probs_;
};

/// Throws InvalidDistribution unless `row` is a probability vector.
void validate_probability_row(std::span<const double> row, std::string_view what);

/// Shannon entropy in nats.
double entropy(const Distribution& d);

/// S_2(p) = -p ln p - (1-p) ln (1-p).
double binary_entropy(double p);

/// D_KL(p || q) in nats.
double kl_divergence(const Distribution& p, const Distribution& q);

}  // namespace kellylab
