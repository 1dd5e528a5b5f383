#include "kellylab/information.hpp"

#include <cmath>
#include <vector>

#include "kellylab/numeric.hpp"

namespace kellylab {
namespace {

std::vector<bool> every(const SequenceDistribution& joint, int parity) {
  std::vector<bool> keep(joint.variables(), false);
  for (std::size_t v = static_cast<std::size_t>(parity); v < keep.size(); v += 2) keep[v] = true;
  return keep;
}

}  // namespace

double mutual_information(const SequenceDistribution& joint) {
  const auto keep_x = every(joint, 0);
  const auto keep_y = every(joint, 1);
  const auto px = marginal(joint, keep_x);
  const auto py = marginal(joint, keep_y);
  std::vector<int> digits(joint.variables());
  CompensatedSum sum;
  for (std::uint64_t index = 0; index < joint.size(); ++index) {
    const double p = joint.prob(index);
    if (p == 0.0) continue;
    joint.digits(index, digits);
    const double denom = px[project(joint, digits, keep_x)] * py[project(joint, digits, keep_y)];
    sum += p * std::log(p / denom);
  }
  return sum.value();
}

double sequence_entropy(const SequenceDistribution& joint) {
  const auto py = outcome_marginal(joint);
  CompensatedSum sum;
  for (double p : py) sum += -xlogx(p);
  return sum.value();
}

double causally_conditional_entropy(const SequenceDistribution& joint) {
  const auto log_factor = log_causal_factor(joint, Direction::y_given_x, 0);
  CompensatedSum sum;
  for (std::uint64_t index = 0; index < joint.size(); ++index) {
    const double p = joint.prob(index);
    if (p != 0.0) sum += -p * log_factor[index];
  }
  return sum.value();
}

double directed_information(const SequenceDistribution& joint) {
  const auto log_factor = log_causal_factor(joint, Direction::y_given_x, 0);
  const auto py = outcome_marginal(joint);
  std::vector<int> xs(joint.n());
  std::vector<int> ys(joint.n());
  CompensatedSum sum;
  for (std::uint64_t index = 0; index < joint.size(); ++index) {
    const double p = joint.prob(index);
    if (p == 0.0) continue;
    joint.decode(index, xs, ys);
    sum += p * (log_factor[index] - std::log(py[outcome_index(ys, joint.y_alphabet().size())]));
  }
  return sum.value();
}

}  // namespace kellylab
