#include "kellylab/distribution.hpp"

#include <cmath>
#include <set>

#include "kellylab/error.hpp"
#include "kellylab/numeric.hpp"

namespace kellylab {

Alphabet::Alphabet(std::vector<std::string> labels) : labels_(std::move(labels)) {
  if (labels_.empty()) throw InvalidParameter("alphabet must be nonempty");
  std::set<std::string_view> seen;
  for (const auto& l : labels_) {
    if (l.empty()) throw InvalidParameter("alphabet labels must be nonempty");
    if (l.find_first_of(",|") != std::string::npos) {
      throw InvalidParameter("alphabet label '" + l + "' contains a reserved character");
    }
    if (!seen.insert(l).second) throw InvalidParameter("duplicate alphabet label '" + l + "'");
  }
}

Alphabet Alphabet::trivial() { return Alphabet({"*"}); }

Alphabet Alphabet::indexed(std::size_t k) {
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < k; ++i) labels.push_back(std::to_string(i));
  return Alphabet(std::move(labels));
}

std::size_t Alphabet::index_of(std::string_view label) const {
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (labels_[i] == label) return i;
  }
  throw InvalidParameter("unknown symbol '" + std::string(label) + "'");
}

void validate_probability_row(std::span<const double> row, std::string_view what) {
  if (row.empty()) throw InvalidDistribution(std::string(what) + ": empty probability vector");
  CompensatedSum total;
  for (double p : row) {
    if (!std::isfinite(p) || p < 0.0) {
      throw InvalidDistribution(std::string(what) + ": negative or non-finite probability");
    }
    total += p;
  }
  if (std::abs(total.value() - 1.0) > kDistributionTolerance) {
    throw InvalidDistribution(std::string(what) + ": probabilities sum to " +
                              std::to_string(total.value()));
  }
}

Distribution::Distribution(std::vector<double> probs) : probs_(std::move(probs)) {
  validate_probability_row(probs_, "distribution");
}

Distribution Distribution::uniform(std::size_t k) {
  if (k == 0) throw InvalidParameter("uniform distribution needs k >= 1");
  return Distribution(std::vector<double>(k, 1.0 / static_cast<double>(k)));
}

Distribution Distribution::point_mass(std::size_t k, std::size_t at) {
  if (at >= k) throw InvalidParameter("point mass index out of range");
  std::vector<double> probs(k, 0.0);
  probs[at] = 1.0;
  return Distribution(std::move(probs));
}

double entropy(const Distribution& d) {
  CompensatedSum s;
  for (double p : d.probs()) s += -xlogx(p);
  return s.value();
}

double binary_entropy(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw InvalidParameter("binary_entropy needs p in [0, 1]");
  return -xlogx(p) - xlogx(1.0 - p);
}

double kl_divergence(const Distribution& p, const Distribution& q) {
  if (p.size() != q.size()) throw InvalidParameter("kl_divergence: alphabet size mismatch");
  CompensatedSum s;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] == 0.0) continue;
    if (q[i] == 0.0) {
      throw AbsoluteContinuityViolation("kl_divergence: p(" + std::to_string(i) +
                                        ") > 0 where q vanishes");
    }
    s += p[i] * std::log(p[i] / q[i]);
  }
  return s.value();
}

}  // namespace kellylab
