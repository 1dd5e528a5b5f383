#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <utility>
#include <variant>
#include <vector>

#include "kellylab/history_table.hpp"
#include "kellylab/process_model.hpp"
#include "kellylab/sequence.hpp"

namespace kellylab {

/// Payoff structure of a game.
///
/// Binary games use outcome index 0 for a win paying y = R and index 1 for a
/// loss y = -Rbar. Horse races carry per-step odds tables o(y_i | y^{i-1}).
class GameSpec {
 public:
  struct Binary {
    double R = 1.0;
    double Rbar = 1.0;
    friend bool operator==(const Binary&, const Binary&) = default;
  };
  struct HorseRace {
    std::size_t M = 0;
    std::vector<HistoryTable> odds;
    friend bool operator==(const HorseRace&, const HorseRace&) = default;
  };

  GameSpec() : variant_(Binary{}) {}

  static GameSpec binary(double R, double Rbar);
  static GameSpec even_money() { return binary(1.0, 1.0); }
  /// One odds table per step; step i is keyed by y^{i-1} and has width M.
  static GameSpec horse_race(std::size_t M, std::vector<HistoryTable> odds);
  /// The same odds vector at every step.
  static GameSpec horse_race(std::size_t M, std::size_t n, std::vector<double> odds);
  /// o = M for every horse and history.
  static GameSpec fair_uniform(std::size_t M, std::size_t n);

  bool is_binary() const { return std::holds_alternative<Binary>(variant_); }
  const Binary& binary_payoff() const;
  const HorseRace& horse() const;
  std::size_t outcomes() const;

  /// Signed payoff of outcome index y in a binary game.
  double payoff(int y) const;
  /// Q(y): Q(R) = Rbar/(R+Rbar), Q(-Rbar) = R/(R+Rbar). Binary only.
  double reference_probability(int y) const;
  /// o(y | y^{step}); binary games map to o = 1/Q(y).
  double odds(std::size_t step, std::span<const int> ys, int y) const;

  bool is_even_money() const;
  bool is_fair_uniform() const;

  /// Throws InvalidModel unless the game can be played on the model.
  void check_compatible(const ProcessModel& model) const;

  friend bool operator==(const GameSpec&, const GameSpec&) = default;

 private:
  explicit GameSpec(std::variant<Binary, HorseRace> v) : variant_(std::move(v)) {}
  std::variant<Binary, HorseRace> variant_;
};

/// Outcome alphabet of a binary game: labels are the payoffs R and -Rbar.
Alphabet binary_alphabet(const GameSpec& game);

/// Shape of a per-step odds table.
TableShape odds_shape(std::size_t M, std::size_t step);

enum class StrategyKind { general, kelly, fractional_kelly };

/// Betting strategy keyed like the outcome kernels, by (y^{i-1}, x^i).
///
/// Binary strategies hold one signed fraction per history with f in
/// [-1/R, 1/Rbar]; negative fractions bet on the loss side. Horse strategies
/// hold a row of nonnegative fractions summing to one.
class Strategy {
 public:
  Strategy() = default;

  static Strategy binary(const GameSpec& game, ModelDims dims, std::vector<HistoryTable> fractions,
                         StrategyKind kind = StrategyKind::general, double lambda = 1.0);
  static Strategy horse(ModelDims dims, std::vector<HistoryTable> rows,
                        StrategyKind kind = StrategyKind::general);
  /// f at every step, ignoring all history.
  static Strategy constant_binary(const GameSpec& game, ModelDims dims, std::size_t n, double f);
  static Strategy stationary_binary(const GameSpec& game, ModelDims dims, std::size_t n, Memory memory,
                                    const HistoryTable::RowFiller& fractions);
  static Strategy stationary_horse(ModelDims dims, std::size_t n, Memory memory,
                                   const HistoryTable::RowFiller& rows);

  bool is_binary() const { return binary_; }
  std::size_t n() const { return tables_.size(); }
  StrategyKind kind() const { return kind_; }
  double lambda() const { return lambda_; }
  const std::vector<HistoryTable>& tables() const { return tables_; }

  /// Binary fraction at 0-based step; ys has length step, xs length step + 1.
  double fraction(std::size_t step, std::span<const int> ys, std::span<const int> xs) const;
  /// Horse fraction row at 0-based step.
  std::span<const double> row(std::size_t step, std::span<const int> ys, std::span<const int> xs) const;

  /// Fraction shown in trajectory reports: f_i for binary, f(y_i|.) for horse.
  double reported_fraction(std::size_t step, std::span<const int> ys, std::span<const int> xs,
                           int y) const;
  /// M_{i+1} / M_i when outcome y occurs.
  double wealth_factor(const GameSpec& game, std::size_t step, std::span<const int> ys,
                       std::span<const int> xs, int y) const;

  /// Throws InvalidStrategy unless the strategy fits the model and game.
  void check_compatible(const ProcessModel& model, const GameSpec& game) const;

  friend bool operator==(const Strategy&, const Strategy&) = default;

 private:
  friend Strategy fractional_kelly(const Strategy& base, double lambda);

  bool binary_ = true;
  StrategyKind kind_ = StrategyKind::general;
  double lambda_ = 1.0;
  std::vector<HistoryTable> tables_;
};

/// Walks every positive-probability history and throws RuinEncountered if
/// some possible outcome has a wealth factor <= 0.
void check_admissible(const ProcessModel& model, const GameSpec& game, const Strategy& strategy,
                      const EnumerationOptions& options = {});

/// f* = (R p - Rbar (1-p)) / (R Rbar); with long_only, negative f* becomes 0.
double kelly_binary(double p_win, double R, double Rbar, bool long_only = false);

/// Kelly fraction from P(y_i | y^{i-1}, x^i) at 0-based step. Throws
/// UndefinedConditional when the history has zero probability.
double kelly_conditional(const ProcessModel& model, const GameSpec& game, std::size_t step,
                         std::span<const int> ys, std::span<const int> xs);

/// Horse-race Kelly row f(. | y^{i-1}, x^i) = P(. | y^{i-1}, x^i).
std::vector<double> kelly_horse(const ProcessModel& model, std::size_t step, std::span<const int> ys,
                                std::span<const int> xs);

/// Kelly strategy for every history of the model.
Strategy kelly_strategy(const ProcessModel& model, const GameSpec& game);

/// Scales binary fractions by lambda in [0, 1].
Strategy fractional_kelly(const Strategy& base, double lambda);

/// The M = 2 horse-race form of a binary game and strategy: odds 1/Q(y)
/// and fraction rows (1 + f y) Q(y).
std::pair<GameSpec, Strategy> embed_binary_as_horse(const GameSpec& game, const Strategy& strategy);

/// v[g] = p (1-p) (ln((1+f)/(1-f)))^2 for even-money betting.
double growth_variance_binary(double p, double f);

/// Capital path of one realized game sequence.
class WealthTrajectory {
 public:
  WealthTrajectory() = default;
  WealthTrajectory(double initial_capital, std::vector<int> xs, std::vector<int> ys,
                   std::vector<double> fractions, std::vector<double> factors);

  std::size_t n() const { return factors_.size(); }
  double initial_capital() const { return initial_capital_; }
  const std::vector<int>& xs() const { return xs_; }
  const std::vector<int>& ys() const { return ys_; }
  const std::vector<double>& fractions() const { return fractions_; }
  const std::vector<double>& factors() const { return factors_; }
  /// M_{i+1} for 0-based step i; capital(n - 1) is the final capital.
  double capital_after(std::size_t step) const { return capital_.at(step); }

 private:
  double initial_capital_ = 1.0;
  std::vector<int> xs_;
  std::vector<int> ys_;
  std::vector<double> fractions_;
  std::vector<double> factors_;
  std::vector<double> capital_;
};

WealthTrajectory play(const GameSpec& game, const Strategy& strategy, std::span<const int> xs,
                      std::span<const int> ys, double initial_capital = 1.0);

/// g_n = (1/n) sum_i ln(factor_i). Throws RuinEncountered if a factor <= 0.
double growth_rate(const WealthTrajectory& trajectory);

/// CSV with header step,x,y,fraction,factor,capital (step is 1-based).
void write_trajectory_csv(std::ostream& out, const WealthTrajectory& trajectory,
                          const Alphabet& x_alphabet, const Alphabet& y_alphabet);

}  // namespace kellylab
