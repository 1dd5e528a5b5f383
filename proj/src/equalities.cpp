#include "kellylab/equalities.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <string>

#include "kellylab/error.hpp"

namespace kellylab {

double equality_tolerance(std::size_t n) {
  if (n <= 1) return 1e-12;
  if (n <= 12) return 1e-10;
  return 1e-9;
}

ExactEnsemble::ExactEnsemble(const ProcessModel& model, const GameSpec* game,
                             const EnumerationOptions& options)
    : model_(model), joint_(joint_sequence(model, options)) {
  if (game != nullptr) {
    game->check_compatible(model);
    game_ = *game;
  }
  const auto log_causal = log_causal_factor(joint_, Direction::y_given_x, 0);
  const auto py = outcome_marginal(joint_);
  const std::size_t n = model.n();
  std::vector<int> xs(n);
  std::vector<int> ys(n);
  for (std::uint64_t index = 0; index < joint_.size(); ++index) {
    const double p = joint_.prob(index);
    if (p == 0.0) continue;
    joint_.decode(index, xs, ys);
    support_.push_back(index);
    prob_.push_back(p);
    log_py_.push_back(std::log(py[outcome_index(ys, model.y_alphabet().size())]));
    log_causal_.push_back(log_causal[index]);
    double log_odds = std::numeric_limits<double>::quiet_NaN();
    if (game_) {
      CompensatedSum sum;
      for (std::size_t i = 0; i < n; ++i) {
        sum += std::log(game_->odds(i, std::span<const int>(ys).first(i), ys[i]));
      }
      log_odds = sum.value();
    }
    log_odds_.push_back(log_odds);
  }
}

std::vector<double> ExactEnsemble::log_wealth(const Strategy& strategy) const {
  if (!game_) throw InvalidParameter("wealth needs a game");
  strategy.check_compatible(model_, *game_);
  const std::size_t n = model_.n();
  std::vector<int> xs(n);
  std::vector<int> ys(n);
  std::vector<double> out(support_.size());
  for (std::size_t k = 0; k < support_.size(); ++k) {
    joint_.decode(support_[k], xs, ys);
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double factor = strategy.wealth_factor(*game_, i, std::span<const int>(ys).first(i),
                                                   std::span<const int>(xs).first(i + 1), ys[i]);
      if (!(factor > 0.0)) {
        throw RuinEncountered("wealth factor " + std::to_string(factor) + " at game " +
                              std::to_string(i + 1) + " on a possible sequence");
      }
      sum += std::log(factor);
    }
    out[k] = sum;
  }
  return out;
}

SequenceTerms ExactEnsemble::terms(std::size_t k, double log_wealth) const {
  return {model_.n(), log_wealth, log_py_[k], log_causal_[k], log_odds_[k]};
}

double ExactEnsemble::expectation(const TrajectoryFunctional& functional, const Strategy* strategy) const {
  std::vector<double> wealth;
  if (functional.needs_strategy()) {
    if (strategy == nullptr) throw InvalidParameter("functional needs a strategy");
    wealth = log_wealth(*strategy);
  }
  return average([&](std::size_t k) {
    return functional.evaluate(terms(k, wealth.empty() ? 0.0 : wealth[k]));
  });
}

double ExactEnsemble::entropy() const {
  return average([&](std::size_t k) { return -log_py_[k]; });
}

double ExactEnsemble::directed_information() const {
  return average([&](std::size_t k) { return log_causal_[k] - log_py_[k]; });
}

double ExactEnsemble::mean_log_odds() const {
  if (!game_) throw InvalidParameter("odds need a game");
  return average([&](std::size_t k) { return log_odds_[k]; });
}

double exact_expectation(const ProcessModel& model, const GameSpec& game, const Strategy& strategy,
                         const TrajectoryFunctional& functional, const EnumerationOptions& options) {
  const ExactEnsemble ensemble(model, game, options);
  return ensemble.expectation(functional, &strategy);
}

Theorem applicable_theorem(const ProcessModel& model, const GameSpec& game) {
  if (!game.is_binary()) return Theorem::five;
  if (model.n() == 1) return model.has_side_information() ? Theorem::two : Theorem::one;
  return model.has_side_information() ? Theorem::four : Theorem::three;
}

namespace {

struct ContinuityWalker {
  const ProcessModel& model;
  const GameSpec& game;
  const Strategy& strategy;
  std::vector<int> xs;
  std::vector<int> ys;

  void visit(std::size_t step) {
    const auto side = model.side_row(step, std::span<const int>(xs).first(step),
                                     std::span<const int>(ys).first(step));
    for (std::size_t x = 0; x < side.size(); ++x) {
      if (side[x] == 0.0) continue;
      xs[step] = static_cast<int>(x);
      const auto y_hist = std::span<const int>(ys).first(step);
      const auto x_hist = std::span<const int>(xs).first(step + 1);
      const auto outcome = model.outcome_row(step, y_hist, x_hist);
      for (std::size_t y = 0; y < outcome.size(); ++y) {
        if (outcome[y] == 0.0) {
          const double factor = strategy.wealth_factor(game, step, y_hist, x_hist, static_cast<int>(y));
          // Kelly at a certain outcome leaves rounding residue of order 1e-16.
          if (factor > 1e-12) {
            throw AbsoluteContinuityViolation(
                "game " + std::to_string(step + 1) + ": outcome '" + model.y_alphabet().label(y) +
                "' has probability zero but the strategy stakes on it (wealth factor " +
                std::to_string(factor) + ")");
          }
          continue;
        }
        ys[step] = static_cast<int>(y);
        if (step + 1 < model.n()) visit(step + 1);
      }
    }
  }
};

}  // namespace

void check_absolute_continuity(const ProcessModel& model, const GameSpec& game, const Strategy& strategy) {
  strategy.check_compatible(model, game);
  ContinuityWalker walker{model, game, strategy, std::vector<int>(model.n()), std::vector<int>(model.n())};
  walker.visit(0);
}

void check_theorem_premises(Theorem theorem, const ProcessModel& model, const GameSpec& game) {
  game.check_compatible(model);
  const std::string name = theorem_name(theorem);
  const bool binary_only = theorem != Theorem::five;
  if (binary_only && !game.is_binary()) throw InvalidModel(name + " needs a binary game");
  if ((theorem == Theorem::one || theorem == Theorem::two) && model.n() != 1) {
    throw InvalidModel(name + " covers a single game");
  }
  if ((theorem == Theorem::one || theorem == Theorem::three) && model.has_side_information()) {
    throw InvalidModel(name + " does not allow side information");
  }
}

namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

// Fills the averages, Jensen bound and Kelly gap shared by every report.
void fill_bounds(EqualityReport& report, const ExactEnsemble& ensemble, const GameSpec& game,
                 double mean_log_wealth, double kelly_log_wealth) {
  const double n = static_cast<double>(ensemble.n());
  const double entropy = ensemble.entropy();
  const double info = ensemble.directed_information();
  const double log_odds = ensemble.mean_log_odds();
  auto& t = report.terms;
  t["mean_growth"] = mean_log_wealth / n;
  t["kelly_growth"] = kelly_log_wealth / n;
  t["entropy"] = entropy;
  t["entropy_per_game"] = entropy / n;
  t[ensemble.n() == 1 ? "mutual_information" : "directed_information"] = info;
  t["information_per_game"] = info / n;
  t["mean_log_odds"] = log_odds;
  if (game.is_binary()) {
    t["kl"] = log_odds - entropy;
    t["kl_per_game"] = (log_odds - entropy) / n;
  }
  if (game.is_binary() && game.is_even_money()) {
    t["even_money_bound"] = std::log(2.0) - entropy / n + info / n;
  }
  if (!game.is_binary() && game.is_fair_uniform()) {
    t["fair_uniform_bound"] =
        std::log(static_cast<double>(game.outcomes())) - entropy / n + info / n;
  }
  report.bound = (log_odds - entropy + info) / n;
  report.gap = report.bound - mean_log_wealth / n;
  report.kelly_gap = report.bound - kelly_log_wealth / n;
  report.saturated = std::abs(report.gap) <= report.tolerance;
}

}  // namespace

EqualityReport verify_theorem(Theorem theorem, const ProcessModel& model, const GameSpec& game,
                              const Strategy& strategy, const EnumerationOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  check_theorem_premises(theorem, model, game);
  const ExactEnsemble ensemble(model, game, options);
  check_absolute_continuity(model, game, strategy);
  const auto wealth = ensemble.log_wealth(strategy);
  const auto kelly_wealth = ensemble.log_wealth(kelly_strategy(model, game));
  const auto exponent = TrajectoryFunctional::theorem_exponent(theorem).exponential();

  EqualityReport report;
  report.theorem = theorem_name(theorem);
  report.expectation =
      ensemble.average([&](std::size_t k) { return exponent.evaluate(ensemble.terms(k, wealth[k])); });
  report.deviation = std::abs(report.expectation - 1.0);
  report.tolerance = equality_tolerance(model.n());
  report.passed = report.deviation <= report.tolerance;
  report.sequences = ensemble.sequences();
  fill_bounds(report, ensemble, game, ensemble.average([&](std::size_t k) { return wealth[k]; }),
              ensemble.average([&](std::size_t k) { return kelly_wealth[k]; }));
  report.wall_seconds = seconds_since(start);
  return report;
}

EqualityReport verify_theorem1(double p, const GameSpec& game, double f) {
  const auto model = ProcessModel::without_side_information(
      1, binary_alphabet(game), Memory::markov(0, 0),
      [p](std::span<const int>, std::span<const int>, std::span<double> row) {
        row[0] = p;
        row[1] = 1.0 - p;
      });
  return verify_theorem1(model, game, Strategy::constant_binary(game, model.dims(), 1, f));
}

EqualityReport verify_theorem1(const ProcessModel& model, const GameSpec& game, const Strategy& strategy) {
  return verify_theorem(Theorem::one, model, game, strategy);
}

EqualityReport verify_theorem2(const ProcessModel& model, const GameSpec& game, const Strategy& strategy) {
  return verify_theorem(Theorem::two, model, game, strategy);
}

EqualityReport verify_theorem3(const ProcessModel& model, const GameSpec& game, const Strategy& strategy,
                               const EnumerationOptions& options) {
  return verify_theorem(Theorem::three, model, game, strategy, options);
}

EqualityReport verify_theorem4(const ProcessModel& model, const GameSpec& game, const Strategy& strategy,
                               const EnumerationOptions& options) {
  return verify_theorem(Theorem::four, model, game, strategy, options);
}

EqualityReport verify_theorem5(const ProcessModel& model, const GameSpec& game, const Strategy& strategy,
                               const EnumerationOptions& options) {
  return verify_theorem(Theorem::five, model, game, strategy, options);
}

double pointwise_unified_gap(const ExactEnsemble& ensemble, const GameSpec& game, const Strategy& strategy,
                             const Strategy& kelly, Theorem theorem) {
  check_theorem_premises(theorem, ensemble.model(), game);
  const auto wealth = ensemble.log_wealth(strategy);
  const auto kelly_wealth = ensemble.log_wealth(kelly);
  const auto exponent = TrajectoryFunctional::theorem_exponent(theorem);
  double worst = 0.0;
  for (std::size_t k = 0; k < ensemble.support_size(); ++k) {
    const double a = exponent.evaluate(ensemble.terms(k, wealth[k]));
    worst = std::max(worst, std::abs(a - (wealth[k] - kelly_wealth[k])));
  }
  return worst;
}

EqualityReport verify_unified(const ProcessModel& model, const GameSpec& game, const Strategy& strategy,
                              const Strategy& kelly, std::optional<Theorem> compare_with,
                              const EnumerationOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  const ExactEnsemble ensemble(model, game, options);
  check_absolute_continuity(model, game, strategy);
  const auto wealth = ensemble.log_wealth(strategy);
  const auto kelly_wealth = ensemble.log_wealth(kelly);

  EqualityReport report;
  report.theorem = "unified";
  report.expectation =
      ensemble.average([&](std::size_t k) { return std::exp(wealth[k] - kelly_wealth[k]); });
  report.deviation = std::abs(report.expectation - 1.0);
  report.tolerance = equality_tolerance(model.n());
  report.passed = report.deviation <= report.tolerance;
  report.sequences = ensemble.sequences();
  fill_bounds(report, ensemble, game, ensemble.average([&](std::size_t k) { return wealth[k]; }),
              ensemble.average([&](std::size_t k) { return kelly_wealth[k]; }));
  const Theorem theorem = compare_with.value_or(applicable_theorem(model, game));
  report.terms["pointwise_gap"] = pointwise_unified_gap(ensemble, game, strategy, kelly, theorem);
  report.wall_seconds = seconds_since(start);
  return report;
}

double efficacy(const ExactEnsemble& ensemble, const Strategy& strategy) {
  const auto wealth = ensemble.log_wealth(strategy);
  const double mean = ensemble.average([&](std::size_t k) {
    const auto t = ensemble.terms(k, wealth[k]);
    return std::exp(t.log_wealth - t.log_py - t.log_odds);
  });
  return std::pow(mean, 1.0 / static_cast<double>(ensemble.n()));
}

double efficacy(const ProcessModel& model, const GameSpec& game, const Strategy& strategy,
                const EnumerationOptions& options) {
  return efficacy(ExactEnsemble(model, game, options), strategy);
}

double efficacy_kelly(const ExactEnsemble& ensemble) {
  const double mean = ensemble.average([&](std::size_t k) {
    const auto t = ensemble.terms(k);
    return std::exp(t.log_py_causal - t.log_py);
  });
  return std::pow(mean, 1.0 / static_cast<double>(ensemble.n()));
}

double efficacy_kelly(const ProcessModel& model, const EnumerationOptions& options) {
  return efficacy_kelly(ExactEnsemble(model, nullptr, options));
}

JensenBounds jensen_bounds(const ProcessModel& model, const GameSpec& game, const EnumerationOptions& options) {
  const ExactEnsemble ensemble(model, game, options);
  const double n = static_cast<double>(model.n());
  JensenBounds b;
  b.n = model.n();
  const double entropy = ensemble.entropy();
  const double info = ensemble.directed_information();
  const double log_odds = ensemble.mean_log_odds();
  b.entropy_per_game = entropy / n;
  b.directed_information_per_game = info / n;
  b.mean_log_odds_per_game = log_odds / n;
  if (game.is_binary()) b.kl_per_game = (log_odds - entropy) / n;
  b.rhs = (log_odds - entropy + info) / n;
  if (game.is_binary() && game.is_even_money()) b.even_money = std::log(2.0) - (entropy - info) / n;
  if (!game.is_binary() && game.is_fair_uniform()) {
    b.fair_uniform = std::log(static_cast<double>(game.outcomes())) - (entropy - info) / n;
  }
  const auto wealth = ensemble.log_wealth(kelly_strategy(model, game));
  b.kelly_growth = ensemble.average([&](std::size_t k) { return wealth[k]; }) / n;
  b.kelly_gap = b.rhs - b.kelly_growth;
  b.kelly_saturates = std::abs(b.kelly_gap) <= equality_tolerance(model.n());
  return b;
}

}  // namespace kellylab
