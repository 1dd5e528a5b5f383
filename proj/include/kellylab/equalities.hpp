#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "kellylab/betting.hpp"
#include "kellylab/functional.hpp"
#include "kellylab/numeric.hpp"
#include "kellylab/process_model.hpp"
#include "kellylab/report.hpp"
#include "kellylab/sequence.hpp"

namespace kellylab {

/// 1e-12 for a single game, 1e-10 up to twelve games, 1e-9 beyond.
double equality_tolerance(std::size_t n);

/// Exhaustive enumeration of a model with the per-sequence log quantities
/// that do not depend on the strategy. Only positive-probability sequences
/// are kept.
class ExactEnsemble {
 public:
  /// `game` may be null when no odds are needed; log_odds is then NaN.
  ExactEnsemble(const ProcessModel& model, const GameSpec* game,
                const EnumerationOptions& options = {});
  ExactEnsemble(const ProcessModel& model, const GameSpec& game,
                const EnumerationOptions& options = {})
      : ExactEnsemble(model, &game, options) {}

  const ProcessModel& model() const { return model_; }
  const SequenceDistribution& joint() const { return joint_; }
  std::size_t n() const { return model_.n(); }
  /// |X|^n |Y|^n.
  std::uint64_t sequences() const { return joint_.size(); }
  std::size_t support_size() const { return support_.size(); }
  std::uint64_t support_index(std::size_t k) const { return support_[k]; }
  double probability(std::size_t k) const { return prob_[k]; }

  /// ln(M_{n+1}/M_1) for every support sequence. Throws RuinEncountered.
  std::vector<double> log_wealth(const Strategy& strategy) const;

  SequenceTerms terms(std::size_t k, double log_wealth = 0.0) const;

  /// sum_k P_k value(k) with compensated summation.
  template <class F>
  double average(F&& value) const;

  /// Average of a functional; functionals with wealth terms need a strategy.
  double expectation(const TrajectoryFunctional& functional, const Strategy* strategy = nullptr) const;

  /// S(Y^n).
  double entropy() const;
  /// I_dr(X^n -> Y^n).
  double directed_information() const;
  /// <ln o(y^n)>; for binary games <s^Q_{y^n}>.
  double mean_log_odds() const;

 private:
  ProcessModel model_;
  std::optional<GameSpec> game_;
  SequenceDistribution joint_;
  std::vector<std::uint64_t> support_;
  std::vector<double> prob_;
  std::vector<double> log_py_;
  std::vector<double> log_causal_;
  std::vector<double> log_odds_;
};

/// <functional> by exact enumeration.
double exact_expectation(const ProcessModel& model, const GameSpec& game, const Strategy& strategy,
                         const TrajectoryFunctional& functional,
                         const EnumerationOptions& options = {});

/// The most specific theorem whose preconditions the model and game meet.
Theorem applicable_theorem(const ProcessModel& model, const GameSpec& game);

/// Throws InvalidModel if the model or game violates the theorem's premises.
void check_theorem_premises(Theorem theorem, const ProcessModel& model, const GameSpec& game);

/// The equalities need the strategy to stake nothing on outcomes the model
/// rules out: a reachable outcome of probability zero must have a wealth
/// factor of zero. Otherwise the exponential average misses that stake.
/// Throws AbsoluteContinuityViolation naming the first offending history.
void check_absolute_continuity(const ProcessModel& model, const GameSpec& game, const Strategy& strategy);

/// Exact check of one equality, with Jensen bound and Kelly saturation terms.
EqualityReport verify_theorem(Theorem theorem, const ProcessModel& model, const GameSpec& game,
                              const Strategy& strategy, const EnumerationOptions& options = {});

/// One binary game with win probability p and constant fraction f.
EqualityReport verify_theorem1(double p, const GameSpec& game, double f);
EqualityReport verify_theorem1(const ProcessModel& model, const GameSpec& game, const Strategy& strategy);
EqualityReport verify_theorem2(const ProcessModel& model, const GameSpec& game, const Strategy& strategy);
EqualityReport verify_theorem3(const ProcessModel& model, const GameSpec& game, const Strategy& strategy,
                               const EnumerationOptions& options = {});
EqualityReport verify_theorem4(const ProcessModel& model, const GameSpec& game, const Strategy& strategy,
                               const EnumerationOptions& options = {});
EqualityReport verify_theorem5(const ProcessModel& model, const GameSpec& game, const Strategy& strategy,
                               const EnumerationOptions& options = {});

/// <exp[n (g_n(f) - g_n(f*))]> = 1. terms["pointwise_gap"] is the largest
/// difference on the support between this exponent and the exponent of
/// `compare_with` (default: the applicable theorem).
EqualityReport verify_unified(const ProcessModel& model, const GameSpec& game, const Strategy& strategy,
                              const Strategy& kelly, std::optional<Theorem> compare_with = std::nullopt,
                              const EnumerationOptions& options = {});

/// Largest |theorem exponent - n (g_n(f) - g_n(f*))| over the support.
double pointwise_unified_gap(const ExactEnsemble& ensemble, const GameSpec& game, const Strategy& strategy,
                             const Strategy& kelly, Theorem theorem);

/// gamma = <exp[n g_n + s_{y^n} - ln o(y^n)]>^{1/n}.
double efficacy(const ProcessModel& model, const GameSpec& game, const Strategy& strategy,
                const EnumerationOptions& options = {});
double efficacy(const ExactEnsemble& ensemble, const Strategy& strategy);

/// gamma* = <exp[i_{x^n -> y^n}]>^{1/n}.
double efficacy_kelly(const ProcessModel& model, const EnumerationOptions& options = {});
double efficacy_kelly(const ExactEnsemble& ensemble);

/// Right-hand sides of the Jensen bounds on <g_n>, all per game.
struct JensenBounds {
  std::size_t n = 0;
  double entropy_per_game = 0.0;
  double directed_information_per_game = 0.0;
  double mean_log_odds_per_game = 0.0;
  /// D_KL(P(y^n) || Q(y^n)) / n; binary games only.
  std::optional<double> kl_per_game;
  /// (<ln o> - S(Y^n) + I_dr) / n; for binary games equal to KL/n + I_dr/n.
  double rhs = 0.0;
  /// ln 2 - S/n + I_dr/n for even-money binary games.
  std::optional<double> even_money;
  /// ln M - S/n + I_dr/n for fair uniform odds.
  std::optional<double> fair_uniform;
  double kelly_growth = 0.0;
  /// rhs - kelly_growth.
  double kelly_gap = 0.0;
  bool kelly_saturates = false;
};

JensenBounds jensen_bounds(const ProcessModel& model, const GameSpec& game,
                           const EnumerationOptions& options = {});

// ---------------------------------------------------------------------------

template <class F>
double ExactEnsemble::average(F&& value) const {
  CompensatedSum sum;
  for (std::size_t k = 0; k < support_.size(); ++k) sum += prob_[k] * value(k);
  return sum.value();
}

}  // namespace kellylab
