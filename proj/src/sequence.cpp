#include "kellylab/sequence.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "kellylab/error.hpp"
#include "kellylab/numeric.hpp"

namespace kellylab {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

/// Advances interleaved digits like an odometer (last digit fastest).
void increment(const SequenceDistribution& joint, std::vector<int>& digits) {
  for (std::size_t v = digits.size(); v-- > 0;) {
    if (++digits[v] < static_cast<int>(joint.base(v))) return;
    digits[v] = 0;
  }
}

struct StepSets {
  std::vector<bool> numerator;
  std::vector<bool> denominator;
};

/// Variable sets of the i-th conditional of a causal factor (0-based step).
StepSets step_sets(std::size_t n, Direction direction, int delay, std::size_t step) {
  StepSets sets{std::vector<bool>(2 * n, false), std::vector<bool>(2 * n, false)};
  const std::size_t own_offset = direction == Direction::y_given_x ? 1 : 0;
  const std::size_t other_offset = 1 - own_offset;
  for (std::size_t j = 0; j <= step; ++j) {
    sets.numerator[2 * j + own_offset] = true;
    if (j < step) sets.denominator[2 * j + own_offset] = true;
  }
  const long last_other = static_cast<long>(step) - delay;
  for (long j = 0; j <= last_other; ++j) {
    sets.numerator[2 * static_cast<std::size_t>(j) + other_offset] = true;
    sets.denominator[2 * static_cast<std::size_t>(j) + other_offset] = true;
  }
  return sets;
}

void check_delay(int delay) {
  if (delay < 0) throw InvalidParameter("causal conditioning delay must be >= 0");
}

std::string describe_prefix(const SequenceDistribution& joint, std::span<const int> digits,
                            const std::vector<bool>& keep) {
  std::string xs;
  std::string ys;
  for (std::size_t v = 0; v < digits.size(); ++v) {
    if (!keep[v]) continue;
    const auto d = static_cast<std::size_t>(digits[v]);
    if (v % 2 == 0) {
      xs += (xs.empty() ? "" : ",") + joint.x_alphabet().label(d);
    } else {
      ys += (ys.empty() ? "" : ",") + joint.y_alphabet().label(d);
    }
  }
  return "x=(" + xs + ") y=(" + ys + ")";
}

}  // namespace

SequenceDistribution::SequenceDistribution(std::size_t n, Alphabet y_alphabet, Alphabet x_alphabet,
                                           std::vector<double> probs)
    : n_(n),
      y_alphabet_(std::move(y_alphabet)),
      x_alphabet_(std::move(x_alphabet)),
      probs_(std::move(probs)) {
  std::uint64_t expected = 1;
  for (std::size_t i = 0; i < n_; ++i) expected *= x_alphabet_.size() * y_alphabet_.size();
  if (probs_.size() != expected) {
    throw InvalidDistribution("sequence table size does not equal |X|^n |Y|^n");
  }
  CompensatedSum total;
  for (double p : probs_) {
    if (!std::isfinite(p) || p < 0.0) throw InvalidDistribution("negative sequence probability");
    total += p;
  }
  if (std::abs(total.value() - 1.0) > kNormalizationTolerance) {
    throw InvalidDistribution("sequence probabilities sum to " + std::to_string(total.value()));
  }
}

void SequenceDistribution::digits(std::uint64_t index, std::span<int> out) const {
  for (std::size_t v = 2 * n_; v-- > 0;) {
    const std::uint64_t b = base(v);
    out[v] = static_cast<int>(index % b);
    index /= b;
  }
}

void SequenceDistribution::decode(std::uint64_t index, std::span<int> xs, std::span<int> ys) const {
  for (std::size_t i = n_; i-- > 0;) {
    ys[i] = static_cast<int>(index % y_alphabet_.size());
    index /= y_alphabet_.size();
    xs[i] = static_cast<int>(index % x_alphabet_.size());
    index /= x_alphabet_.size();
  }
}

std::uint64_t SequenceDistribution::encode(std::span<const int> xs, std::span<const int> ys) const {
  if (xs.size() != n_ || ys.size() != n_) throw InvalidParameter("sequence length mismatch");
  std::uint64_t index = 0;
  for (std::size_t i = 0; i < n_; ++i) {
    index = index * x_alphabet_.size() + static_cast<std::uint64_t>(xs[i]);
    index = index * y_alphabet_.size() + static_cast<std::uint64_t>(ys[i]);
  }
  return index;
}

namespace {

struct JointBuilder {
  const ProcessModel& model;
  std::vector<double>& probs;
  std::vector<int> xs;
  std::vector<int> ys;

  void visit(std::size_t step, double log_p, std::uint64_t base_index) {
    const auto x_size = model.x_alphabet().size();
    const auto y_size = model.y_alphabet().size();
    const auto side = model.side_row(step, std::span<const int>(xs).first(step),
                                     std::span<const int>(ys).first(step));
    for (std::size_t x = 0; x < x_size; ++x) {
      if (side[x] == 0.0) continue;
      xs[step] = static_cast<int>(x);
      const auto outcome = model.outcome_row(step, std::span<const int>(ys).first(step),
                                             std::span<const int>(xs).first(step + 1));
      const double log_px = log_p + std::log(side[x]);
      for (std::size_t y = 0; y < y_size; ++y) {
        if (outcome[y] == 0.0) continue;
        ys[step] = static_cast<int>(y);
        const double log_pxy = log_px + std::log(outcome[y]);
        const std::uint64_t index = (base_index * x_size + x) * y_size + y;
        if (step + 1 == model.n()) {
          probs[index] = std::exp(log_pxy);
        } else {
          visit(step + 1, log_pxy, index);
        }
      }
    }
  }
};

}  // namespace

SequenceDistribution joint_sequence(const ProcessModel& model, const EnumerationOptions& options) {
  const std::uint64_t count = model.sequence_count();
  if (count > options.cap) {
    throw EnumerationTooLarge("model has " +
                              (count == std::numeric_limits<std::uint64_t>::max()
                                   ? std::string("more than 2^64")
                                   : std::to_string(count)) +
                              " sequences; enumeration cap is " + std::to_string(options.cap));
  }
  std::vector<double> probs(count, 0.0);
  JointBuilder builder{model, probs, std::vector<int>(model.n()), std::vector<int>(model.n())};
  builder.visit(0, 0.0, 0);
  try {
    return SequenceDistribution(model.n(), model.y_alphabet(), model.x_alphabet(), std::move(probs));
  } catch (const InvalidDistribution& e) {
    throw InvalidModel(std::string("model is not normalized: ") + e.what());
  }
}

std::uint64_t project(const SequenceDistribution& joint, std::span<const int> digits,
                      const std::vector<bool>& keep) {
  std::uint64_t index = 0;
  for (std::size_t v = 0; v < digits.size(); ++v) {
    if (keep[v]) index = index * joint.base(v) + static_cast<std::uint64_t>(digits[v]);
  }
  return index;
}

std::vector<double> marginal(const SequenceDistribution& joint, const std::vector<bool>& keep) {
  if (keep.size() != joint.variables()) throw InvalidParameter("marginal: variable mask size");
  std::uint64_t size = 1;
  for (std::size_t v = 0; v < keep.size(); ++v) {
    if (keep[v]) size *= joint.base(v);
  }
  std::vector<CompensatedSum> sums(size);
  std::vector<int> digits(joint.variables(), 0);
  for (std::uint64_t index = 0; index < joint.size(); ++index, increment(joint, digits)) {
    const double p = joint.prob(index);
    if (p != 0.0) sums[project(joint, digits, keep)] += p;
  }
  std::vector<double> out(size);
  for (std::uint64_t i = 0; i < size; ++i) out[i] = sums[i].value();
  return out;
}

std::vector<double> outcome_marginal(const SequenceDistribution& joint) {
  std::vector<bool> keep(joint.variables(), false);
  for (std::size_t i = 0; i < joint.n(); ++i) keep[2 * i + 1] = true;
  return marginal(joint, keep);
}

std::uint64_t outcome_index(std::span<const int> ys, std::size_t y_size) {
  std::uint64_t index = 0;
  for (int y : ys) index = index * y_size + static_cast<std::uint64_t>(y);
  return index;
}

std::vector<double> log_causal_factor(const SequenceDistribution& joint, Direction direction,
                                      int delay) {
  check_delay(delay);
  const std::size_t n = joint.n();
  std::vector<StepSets> sets;
  std::vector<std::vector<double>> numerators;
  std::vector<std::vector<double>> denominators;
  for (std::size_t i = 0; i < n; ++i) {
    sets.push_back(step_sets(n, direction, delay, i));
    numerators.push_back(marginal(joint, sets.back().numerator));
    denominators.push_back(marginal(joint, sets.back().denominator));
  }
  std::vector<double> out(joint.size(), kNaN);
  std::vector<int> digits(joint.variables(), 0);
  for (std::uint64_t index = 0; index < joint.size(); ++index, increment(joint, digits)) {
    if (joint.prob(index) == 0.0) continue;
    double log_factor = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double num = numerators[i][project(joint, digits, sets[i].numerator)];
      const double den = denominators[i][project(joint, digits, sets[i].denominator)];
      if (den <= 0.0) {
        throw UndefinedConditional("conditioning event " +
                                   describe_prefix(joint, digits, sets[i].denominator) +
                                   " has zero probability");
      }
      log_factor += std::log(num) - std::log(den);
    }
    out[index] = log_factor;
  }
  return out;
}

std::vector<double> causal_factor(const SequenceDistribution& joint, Direction direction, int delay) {
  auto values = log_causal_factor(joint, direction, delay);
  for (double& v : values) v = std::exp(v);
  return values;
}

double causal_factor(const SequenceDistribution& joint, Direction direction, int delay,
                     std::span<const int> xs, std::span<const int> ys) {
  check_delay(delay);
  const std::size_t n = joint.n();
  std::vector<int> digits(2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    digits[2 * i] = xs[i];
    digits[2 * i + 1] = ys[i];
  }
  double factor = 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto sets = step_sets(n, direction, delay, i);
    const double den = marginal(joint, sets.denominator)[project(joint, digits, sets.denominator)];
    if (den <= 0.0) {
      throw UndefinedConditional("conditioning event " +
                                 describe_prefix(joint, digits, sets.denominator) +
                                 " has zero probability");
    }
    factor *= marginal(joint, sets.numerator)[project(joint, digits, sets.numerator)] / den;
  }
  return factor;
}

}  // namespace kellylab
