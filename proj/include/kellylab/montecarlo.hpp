#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "kellylab/betting.hpp"
#include "kellylab/functional.hpp"
#include "kellylab/process_model.hpp"
#include "kellylab/report.hpp"

namespace kellylab {

struct SamplerConfig {
  std::uint64_t seed = 0;
  std::uint64_t trajectories = 10'000;
  /// Thread count; results do not depend on it.
  unsigned workers = 1;
};

void validate(const SamplerConfig& config);

/// Random stream of one trajectory, derived from (seed, trajectory index)
/// alone so that any worker can produce it.
class TrajectoryStream {
 public:
  TrajectoryStream(std::uint64_t seed, std::uint64_t trajectory);
  /// Uniform double in [0, 1) with 53 random bits.
  double uniform();

 private:
  std::mt19937_64 engine_;
};

/// Index drawn from `probs` by inverse transform; never returns a
/// zero-probability index.
int draw_index(std::span<const double> probs, double u);

struct SampledPath {
  std::vector<int> xs;
  std::vector<int> ys;
  WealthTrajectory wealth;
};

/// Draws (x_i, y_i) sequentially from the causal kernels, one uniform for
/// each x_i and one for each y_i, and plays the strategy along the path.
SampledPath sample_trajectory(const ProcessModel& model, const GameSpec& game, const Strategy& strategy,
                              TrajectoryStream& stream);

/// Sequence drawn without a strategy.
void sample_sequence(const ProcessModel& model, TrajectoryStream& stream, std::span<int> xs,
                     std::span<int> ys);

/// ln P(y^n) summed over x^n by a forward pass that keeps only the x
/// history the remaining kernels can still see.
double log_outcome_probability(const ProcessModel& model, std::span<const int> ys);

/// Per-trajectory log terms for trajectories 0..count-1 in index order.
/// `strategy` may be null, leaving log_wealth at 0.
std::vector<SequenceTerms> sample_terms(const ProcessModel& model, const GameSpec& game,
                                        const Strategy* strategy, const SamplerConfig& config);

/// Sample mean, standard error and largest contribution share of `values`.
Estimate summarize(std::span<const double> values, std::uint64_t seed);

Estimate estimate(const ProcessModel& model, const GameSpec& game, const Strategy* strategy,
                  const TrajectoryFunctional& functional, const SamplerConfig& config);

/// Monte Carlo check of one equality; passes when |mean - 1| <= 4 stderr.
EqualityReport verify_monte_carlo(Theorem theorem, const ProcessModel& model, const GameSpec& game,
                                  const Strategy& strategy, const SamplerConfig& config);

/// Monte Carlo check of <exp[n (g_n(f) - g_n(f*))]> = 1.
EqualityReport verify_unified_monte_carlo(const ProcessModel& model, const GameSpec& game,
                                          const Strategy& strategy, const Strategy& kelly,
                                          const SamplerConfig& config);

}  // namespace kellylab
