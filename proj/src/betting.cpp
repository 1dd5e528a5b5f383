#include "kellylab/betting.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <string>

#include "kellylab/error.hpp"
#include "kellylab/numeric.hpp"

namespace kellylab {
namespace {

constexpr double kRowTolerance = 1e-12;

void check_binary_fraction(double f, const GameSpec::Binary& payoff) {
  if (!std::isfinite(f) || f < -1.0 / payoff.R || f > 1.0 / payoff.Rbar) {
    throw InvalidStrategy("binary fraction " + std::to_string(f) + " outside [-1/R, 1/Rbar]");
  }
}

void check_horse_row(std::span<const double> row) {
  CompensatedSum total;
  for (double f : row) {
    if (!std::isfinite(f) || f < 0.0) throw InvalidStrategy("horse fractions must be >= 0");
    total += f;
  }
  if (std::abs(total.value() - 1.0) > kRowTolerance) {
    throw InvalidStrategy("horse fraction row sums to " + std::to_string(total.value()) +
                          "; the whole capital must be bet every race");
  }
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

// ---------------------------------------------------------------------------
// GameSpec

TableShape odds_shape(std::size_t M, std::size_t step) { return {M, step, 1, 0, M}; }

GameSpec GameSpec::binary(double R, double Rbar) {
  if (!(R > 0.0) || !(Rbar > 0.0) || !std::isfinite(R) || !std::isfinite(Rbar)) {
    throw InvalidParameter("binary payoffs need R > 0 and Rbar > 0");
  }
  return GameSpec(Binary{R, Rbar});
}

GameSpec GameSpec::horse_race(std::size_t M, std::vector<HistoryTable> odds) {
  if (M < 2) throw InvalidParameter("a horse race needs M >= 2");
  for (std::size_t i = 0; i < odds.size(); ++i) {
    if (!(odds[i].shape() == odds_shape(M, i))) {
      throw InvalidParameter("odds table at step " + std::to_string(i + 1) + " has the wrong shape");
    }
    odds[i].for_each_row([](std::uint64_t, std::span<const double> row) {
      for (double o : row) {
        if (!(o > 0.0) || !std::isfinite(o)) throw InvalidParameter("odds must be finite and > 0");
      }
    });
  }
  return GameSpec(HorseRace{M, std::move(odds)});
}

GameSpec GameSpec::horse_race(std::size_t M, std::size_t n, std::vector<double> odds) {
  if (odds.size() != M) throw InvalidParameter("odds vector must have one entry per horse");
  std::vector<HistoryTable> tables;
  for (std::size_t i = 0; i < n; ++i) {
    HistoryTable table(odds_shape(M, i), Memory::markov(0, 0));
    table.fill([&](auto, auto, std::span<double> row) { std::copy(odds.begin(), odds.end(), row.begin()); });
    tables.push_back(std::move(table));
  }
  return horse_race(M, std::move(tables));
}

GameSpec GameSpec::fair_uniform(std::size_t M, std::size_t n) {
  return horse_race(M, n, std::vector<double>(M, static_cast<double>(M)));
}

const GameSpec::Binary& GameSpec::binary_payoff() const {
  if (!is_binary()) throw UnsupportedForHorseRace("binary payoff requested from a horse race");
  return std::get<Binary>(variant_);
}

const GameSpec::HorseRace& GameSpec::horse() const {
  if (is_binary()) throw InvalidParameter("horse-race data requested from a binary game");
  return std::get<HorseRace>(variant_);
}

std::size_t GameSpec::outcomes() const { return is_binary() ? 2 : horse().M; }

double GameSpec::payoff(int y) const {
  const auto& b = binary_payoff();
  return y == 0 ? b.R : -b.Rbar;
}

double GameSpec::reference_probability(int y) const {
  const auto& b = binary_payoff();
  return y == 0 ? b.Rbar / (b.R + b.Rbar) : b.R / (b.R + b.Rbar);
}

double GameSpec::odds(std::size_t step, std::span<const int> ys, int y) const {
  if (is_binary()) return 1.0 / reference_probability(y);
  const auto& h = horse();
  if (step >= h.odds.size()) throw InvalidParameter("no odds table for step " + std::to_string(step + 1));
  return h.odds[step].row(ys, {})[static_cast<std::size_t>(y)];
}

bool GameSpec::is_even_money() const {
  if (!is_binary()) return false;
  const auto& b = binary_payoff();
  return b.R == 1.0 && b.Rbar == 1.0;
}

bool GameSpec::is_fair_uniform() const {
  if (is_binary()) return false;
  const auto& h = horse();
  bool uniform = true;
  for (const auto& table : h.odds) {
    table.for_each_row([&](std::uint64_t, std::span<const double> row) {
      for (double o : row) uniform = uniform && o == static_cast<double>(h.M);
    });
  }
  return uniform;
}

void GameSpec::check_compatible(const ProcessModel& model) const {
  if (model.y_alphabet().size() != outcomes()) {
    throw InvalidModel("game has " + std::to_string(outcomes()) + " outcomes but the model has " +
                       std::to_string(model.y_alphabet().size()));
  }
  if (!is_binary() && horse().odds.size() < model.n()) {
    throw InvalidModel("horse race has fewer odds tables than games");
  }
}

// ---------------------------------------------------------------------------
// Strategy

Strategy Strategy::binary(const GameSpec& game, ModelDims dims, std::vector<HistoryTable> fractions,
                          StrategyKind kind, double lambda) {
  const auto& payoff = game.binary_payoff();
  if (dims.y != 2) throw InvalidStrategy("binary strategies need a two-outcome alphabet");
  for (std::size_t i = 0; i < fractions.size(); ++i) {
    auto expected = outcome_shape(dims, i);
    expected.width = 1;
    if (!(fractions[i].shape() == expected)) {
      throw InvalidStrategy("fraction table at step " + std::to_string(i + 1) + " has the wrong shape");
    }
    fractions[i].for_each_row(
        [&](std::uint64_t, std::span<const double> row) { check_binary_fraction(row[0], payoff); });
  }
  Strategy s;
  s.binary_ = true;
  s.kind_ = kind;
  s.lambda_ = lambda;
  s.tables_ = std::move(fractions);
  return s;
}

Strategy Strategy::horse(ModelDims dims, std::vector<HistoryTable> rows, StrategyKind kind) {
  if (kind == StrategyKind::fractional_kelly) {
    throw UnsupportedForHorseRace("fractional Kelly is not defined for horse races");
  }
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (!(rows[i].shape() == outcome_shape(dims, i))) {
      throw InvalidStrategy("fraction table at step " + std::to_string(i + 1) + " has the wrong shape");
    }
    rows[i].for_each_row([](std::uint64_t, std::span<const double> row) { check_horse_row(row); });
  }
  Strategy s;
  s.binary_ = false;
  s.kind_ = kind;
  s.tables_ = std::move(rows);
  return s;
}

Strategy Strategy::constant_binary(const GameSpec& game, ModelDims dims, std::size_t n, double f) {
  return stationary_binary(game, dims, n, Memory::markov(0, 0),
                           [f](auto, auto, std::span<double> row) { row[0] = f; });
}

Strategy Strategy::stationary_binary(const GameSpec& game, ModelDims dims, std::size_t n,
                                     Memory memory, const HistoryTable::RowFiller& fractions) {
  std::vector<HistoryTable> tables;
  for (std::size_t i = 0; i < n; ++i) {
    auto shape = outcome_shape(dims, i);
    shape.width = 1;
    HistoryTable table(shape, memory);
    table.fill(fractions);
    tables.push_back(std::move(table));
  }
  return binary(game, dims, std::move(tables));
}

Strategy Strategy::stationary_horse(ModelDims dims, std::size_t n, Memory memory,
                                    const HistoryTable::RowFiller& rows) {
  std::vector<HistoryTable> tables;
  for (std::size_t i = 0; i < n; ++i) {
    HistoryTable table(outcome_shape(dims, i), memory);
    table.fill(rows);
    tables.push_back(std::move(table));
  }
  return horse(dims, std::move(tables));
}

double Strategy::fraction(std::size_t step, std::span<const int> ys, std::span<const int> xs) const {
  if (!binary_) throw InvalidStrategy("scalar fraction requested from a horse-race strategy");
  return tables_.at(step).row(ys, xs)[0];
}

std::span<const double> Strategy::row(std::size_t step, std::span<const int> ys,
                                      std::span<const int> xs) const {
  if (binary_) throw InvalidStrategy("fraction row requested from a binary strategy");
  return tables_.at(step).row(ys, xs);
}

double Strategy::reported_fraction(std::size_t step, std::span<const int> ys, std::span<const int> xs,
                                   int y) const {
  if (binary_) return fraction(step, ys, xs);
  return row(step, ys, xs)[static_cast<std::size_t>(y)];
}

double Strategy::wealth_factor(const GameSpec& game, std::size_t step, std::span<const int> ys,
                               std::span<const int> xs, int y) const {
  if (binary_) return 1.0 + fraction(step, ys, xs) * game.payoff(y);
  return row(step, ys, xs)[static_cast<std::size_t>(y)] * game.odds(step, ys, y);
}

void Strategy::check_compatible(const ProcessModel& model, const GameSpec& game) const {
  game.check_compatible(model);
  if (binary_ != game.is_binary()) {
    throw InvalidStrategy("strategy and game disagree on binary versus horse race");
  }
  if (tables_.size() != model.n()) {
    throw InvalidStrategy("strategy covers " + std::to_string(tables_.size()) + " games, model has " +
                          std::to_string(model.n()));
  }
  for (std::size_t i = 0; i < tables_.size(); ++i) {
    auto expected = outcome_shape(model.dims(), i);
    if (binary_) expected.width = 1;
    if (!(tables_[i].shape() == expected)) {
      throw InvalidStrategy("strategy table at step " + std::to_string(i + 1) +
                            " does not match the model's alphabets");
    }
  }
}

namespace {

struct AdmissibilityWalker {
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
        if (outcome[y] == 0.0) continue;
        const double factor = strategy.wealth_factor(game, step, y_hist, x_hist, static_cast<int>(y));
        if (!(factor > 0.0)) {
          throw RuinEncountered("wealth factor " + std::to_string(factor) + " at game " +
                                std::to_string(step + 1) + " on a possible outcome");
        }
        ys[step] = static_cast<int>(y);
        if (step + 1 < model.n()) visit(step + 1);
      }
    }
  }
};

}  // namespace

void check_admissible(const ProcessModel& model, const GameSpec& game, const Strategy& strategy,
                      const EnumerationOptions& options) {
  strategy.check_compatible(model, game);
  if (model.sequence_count() > options.cap) {
    throw EnumerationTooLarge("admissibility check exceeds the enumeration cap");
  }
  AdmissibilityWalker walker{model, game, strategy, std::vector<int>(model.n()),
                             std::vector<int>(model.n())};
  walker.visit(0);
}

// ---------------------------------------------------------------------------
// Kelly

double kelly_binary(double p_win, double R, double Rbar, bool long_only) {
  if (!(p_win >= 0.0 && p_win <= 1.0)) throw InvalidParameter("p_win must lie in [0, 1]");
  if (!(R > 0.0) || !(Rbar > 0.0)) throw InvalidParameter("payoffs must be positive");
  // Rounding can push a certain-outcome fraction a hair past the interval end.
  const double f = std::clamp((R * p_win - Rbar * (1.0 - p_win)) / (R * Rbar), -1.0 / R, 1.0 / Rbar);
  return long_only && f < 0.0 ? 0.0 : f;
}

namespace {

void require_positive_history(const ProcessModel& model, std::span<const int> ys,
                              std::span<const int> xs) {
  if (model.history_probability(ys, xs) <= 0.0) {
    throw UndefinedConditional("betting history at game " + std::to_string(ys.size() + 1) +
                               " has zero probability");
  }
}

}  // namespace

double kelly_conditional(const ProcessModel& model, const GameSpec& game, std::size_t step,
                         std::span<const int> ys, std::span<const int> xs) {
  game.check_compatible(model);
  if (ys.size() != step || xs.size() != step + 1) throw InvalidParameter("history length mismatch");
  require_positive_history(model, ys, xs);
  const auto& b = game.binary_payoff();
  return kelly_binary(model.outcome_row(step, ys, xs)[0], b.R, b.Rbar);
}

std::vector<double> kelly_horse(const ProcessModel& model, std::size_t step, std::span<const int> ys,
                                std::span<const int> xs) {
  if (ys.size() != step || xs.size() != step + 1) throw InvalidParameter("history length mismatch");
  require_positive_history(model, ys, xs);
  const auto row = model.outcome_row(step, ys, xs);
  return {row.begin(), row.end()};
}

Strategy kelly_strategy(const ProcessModel& model, const GameSpec& game) {
  game.check_compatible(model);
  std::vector<HistoryTable> tables;
  for (std::size_t i = 0; i < model.n(); ++i) {
    const auto& kernel = model.y_kernel(i).table();
    auto shape = kernel.shape();
    if (game.is_binary()) shape.width = 1;
    HistoryTable table(shape, kernel.memory());
    kernel.for_each_row([&](std::uint64_t key, std::span<const double> probs) {
      if (game.is_binary()) {
        const auto& b = game.binary_payoff();
        const double f = kelly_binary(probs[0], b.R, b.Rbar);
        table.set_row(key, std::span<const double>(&f, 1));
      } else {
        table.set_row(key, probs);
      }
    });
    tables.push_back(std::move(table));
  }
  if (game.is_binary()) {
    return Strategy::binary(game, model.dims(), std::move(tables), StrategyKind::kelly);
  }
  return Strategy::horse(model.dims(), std::move(tables), StrategyKind::kelly);
}

Strategy fractional_kelly(const Strategy& base, double lambda) {
  if (!base.is_binary()) throw UnsupportedForHorseRace("fractional Kelly needs a binary strategy");
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw InvalidParameter("lambda must lie in [0, 1]");
  std::vector<HistoryTable> tables;
  for (const auto& source : base.tables()) {
    HistoryTable table(source.shape(), source.memory());
    source.for_each_row([&](std::uint64_t key, std::span<const double> row) {
      const double f = lambda * row[0];
      table.set_row(key, std::span<const double>(&f, 1));
    });
    tables.push_back(std::move(table));
  }
  // Scaling toward zero keeps every fraction inside the admissible interval.
  Strategy scaled = base;
  scaled.tables_ = std::move(tables);
  scaled.kind_ = lambda == 1.0 ? base.kind() : StrategyKind::fractional_kelly;
  scaled.lambda_ = base.lambda() * lambda;
  return scaled;
}

double growth_variance_binary(double p, double f) {
  if (!(p >= 0.0 && p <= 1.0)) throw InvalidParameter("p must lie in [0, 1]");
  if (!(std::abs(f) < 1.0)) throw InvalidParameter("growth variance needs |f| < 1");
  const double log_ratio = std::log((1.0 + f) / (1.0 - f));
  return p * (1.0 - p) * log_ratio * log_ratio;
}

// ---------------------------------------------------------------------------
// Wealth

WealthTrajectory::WealthTrajectory(double initial_capital, std::vector<int> xs, std::vector<int> ys,
                                   std::vector<double> fractions, std::vector<double> factors)
    : initial_capital_(initial_capital),
      xs_(std::move(xs)),
      ys_(std::move(ys)),
      fractions_(std::move(fractions)),
      factors_(std::move(factors)) {
  if (!(initial_capital_ > 0.0)) throw InvalidParameter("initial capital must be positive");
  const auto n = factors_.size();
  if (xs_.size() != n || ys_.size() != n || fractions_.size() != n) {
    throw InvalidParameter("trajectory columns have different lengths");
  }
  double capital = initial_capital_;
  for (double factor : factors_) {
    capital *= factor;
    capital_.push_back(capital);
  }
}

WealthTrajectory play(const GameSpec& game, const Strategy& strategy, std::span<const int> xs,
                      std::span<const int> ys, double initial_capital) {
  const std::size_t n = ys.size();
  if (xs.size() != n || strategy.n() < n) throw InvalidParameter("sequence length mismatch");
  std::vector<double> fractions(n);
  std::vector<double> factors(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto y_hist = ys.first(i);
    const auto x_hist = xs.first(i + 1);
    fractions[i] = strategy.reported_fraction(i, y_hist, x_hist, ys[i]);
    factors[i] = strategy.wealth_factor(game, i, y_hist, x_hist, ys[i]);
  }
  return WealthTrajectory(initial_capital, {xs.begin(), xs.end()}, {ys.begin(), ys.end()},
                          std::move(fractions), std::move(factors));
}

double growth_rate(const WealthTrajectory& trajectory) {
  if (trajectory.n() == 0) throw InvalidParameter("growth rate of an empty trajectory");
  CompensatedSum sum;
  for (std::size_t i = 0; i < trajectory.n(); ++i) {
    const double factor = trajectory.factors()[i];
    if (!(factor > 0.0)) {
      throw RuinEncountered("wealth factor " + std::to_string(factor) + " at game " +
                            std::to_string(i + 1));
    }
    sum += std::log(factor);
  }
  return sum.value() / static_cast<double>(trajectory.n());
}

void write_trajectory_csv(std::ostream& out, const WealthTrajectory& trajectory,
                          const Alphabet& x_alphabet, const Alphabet& y_alphabet) {
  out << "step,x,y,fraction,factor,capital\n";
  for (std::size_t i = 0; i < trajectory.n(); ++i) {
    out << (i + 1) << ',' << x_alphabet.label(static_cast<std::size_t>(trajectory.xs()[i])) << ','
        << y_alphabet.label(static_cast<std::size_t>(trajectory.ys()[i])) << ','
        << format_double(trajectory.fractions()[i]) << ',' << format_double(trajectory.factors()[i])
        << ',' << format_double(trajectory.capital_after(i)) << '\n';
  }
}

}  // namespace kellylab

namespace kellylab {

Alphabet binary_alphabet(const GameSpec& game) {
  const auto& b = game.binary_payoff();
  char win[40];
  char lose[40];
  std::snprintf(win, sizeof win, "%g", b.R);
  std::snprintf(lose, sizeof lose, "%g", -b.Rbar);
  return Alphabet({win, lose});
}

std::pair<GameSpec, Strategy> embed_binary_as_horse(const GameSpec& game, const Strategy& strategy) {
  if (!strategy.is_binary()) throw InvalidStrategy("embedding needs a binary strategy");
  const double q_win = game.reference_probability(0);
  const double q_lose = game.reference_probability(1);
  auto horse_game = GameSpec::horse_race(2, strategy.n(), {1.0 / q_win, 1.0 / q_lose});
  std::vector<HistoryTable> rows;
  for (const auto& source : strategy.tables()) {
    auto shape = source.shape();
    shape.width = 2;
    HistoryTable table(shape, source.memory());
    source.for_each_row([&](std::uint64_t key, std::span<const double> f) {
      const double win = (1.0 + f[0] * game.payoff(0)) * q_win;
      const double row[2] = {win, 1.0 - win};
      table.set_row(key, row);
    });
    rows.push_back(std::move(table));
  }
  const ModelDims dims{2, rows.empty() ? 1 : rows.front().shape().other_base};
  const auto kind =
      strategy.kind() == StrategyKind::kelly ? StrategyKind::kelly : StrategyKind::general;
  return {std::move(horse_game), Strategy::horse(dims, std::move(rows), kind)};
}

}  // namespace kellylab
