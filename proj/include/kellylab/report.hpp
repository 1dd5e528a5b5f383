#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>

namespace kellylab {

/// Monte Carlo sample mean with its standard error.
struct Estimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::uint64_t count = 0;
  std::uint64_t seed = 0;
  /// Largest single-trajectory share of the summed absolute contributions.
  double max_share = 0.0;
  bool heavy_tail = false;

  friend bool operator==(const Estimate&, const Estimate&) = default;
};

inline constexpr double kHeavyTailShare = 0.10;

/// Result of one equality verification.
struct EqualityReport {
  std::string theorem;
  double expectation = 0.0;
  double deviation = 0.0;
  double tolerance = 0.0;
  bool passed = false;
  /// Named averages: mean_growth, entropy, information, kl, mean_log_odds,
  /// kelly_growth and friends. Per-game values carry a _per_game suffix.
  std::map<std::string, double> terms;
  /// Jensen right-hand side for <g_n>.
  double bound = 0.0;
  /// bound - <g_n>, signed.
  double gap = 0.0;
  /// bound - <g_n(f*)>, signed.
  double kelly_gap = 0.0;
  bool saturated = false;
  std::uint64_t sequences = 0;
  double wall_seconds = 0.0;
  std::optional<std::uint64_t> seed;
  std::optional<Estimate> monte_carlo;
};

}  // namespace kellylab
