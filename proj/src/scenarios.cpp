#include "kellylab/scenarios.hpp"

#include <cmath>
#include <string>

#include "kellylab/error.hpp"
#include "kellylab/numeric.hpp"

namespace kellylab::scenarios {
namespace {

void require_probability(double v, const char* name, bool open = false) {
  const bool ok = open ? (v > 0.0 && v < 1.0) : (v >= 0.0 && v <= 1.0);
  if (!ok) {
    throw InvalidParameter(std::string(name) + " must lie in " + (open ? "(0, 1)" : "[0, 1]") +
                           ", got " + std::to_string(v));
  }
}

void require_games(std::size_t n) {
  if (n < 1) throw InvalidParameter("n must be at least 1");
}

using Row = std::span<double>;
using Window = std::span<const int>;

Scenario build_iid(const IidCoin& s) {
  require_probability(s.p, "p");
  require_games(s.n);
  const auto game = GameSpec::binary(s.R, s.Rbar);
  auto model = ProcessModel::without_side_information(
      s.n, binary_alphabet(game), Memory::markov(0, 0), [&](Window, Window, Row row) {
        row[0] = s.p;
        row[1] = 1.0 - s.p;
      });
  const double f = kelly_binary(s.p, s.R, s.Rbar);
  const double q_win = game.reference_probability(0);
  Scenario out{"iid-coin", std::move(model), game, {}};
  out.reference["kelly_fraction"] = f;
  out.reference["entropy"] = static_cast<double>(s.n) * binary_entropy(s.p);
  out.reference["kelly_growth"] =
      kl_divergence(Distribution({s.p, 1.0 - s.p}), Distribution({q_win, 1.0 - q_win}));
  out.reference["directed_information"] = 0.0;
  if (game.is_even_money()) out.reference["growth_variance_kelly"] = growth_variance_binary(s.p, f);
  return out;
}

Scenario build_informant(const NoisyInformant& s) {
  require_probability(s.p, "p");
  require_probability(s.q, "q");
  require_games(s.n);
  const auto game = GameSpec::binary(s.R, s.Rbar);
  const double p = s.p;
  const double pb = 1.0 - p;
  const double q = s.q;
  const double qb = 1.0 - q;
  // Cells indexed [x][y] with index 0 meaning the winning side.
  const double cell[2][2] = {{p * q, pb * qb}, {p * qb, pb * q}};
  const double px[2] = {cell[0][0] + cell[0][1], cell[1][0] + cell[1][1]};
  auto model = ProcessModel::stationary(
      s.n, binary_alphabet(game), binary_alphabet(game), Memory::markov(0, 1),
      [&](Window, Window x, Row row) {
        const int xi = x.back();
        if (px[xi] == 0.0) {
          row[0] = p;
          row[1] = pb;
          return;
        }
        row[0] = cell[xi][0] / px[xi];
        row[1] = 1.0 - row[0];
      },
      Memory::markov(0, 0), [&](Window, Window, Row row) {
        row[0] = px[0];
        row[1] = px[1];
      });
  Scenario out{"noisy-informant", std::move(model), game, {}};
  const double mi = binary_entropy(px[0]) - binary_entropy(q);
  const double q_win = game.reference_probability(0);
  const double kl = kl_divergence(Distribution({p, pb}), Distribution({q_win, 1.0 - q_win}));
  const double n = static_cast<double>(s.n);
  out.reference["mutual_information"] = mi;
  out.reference["directed_information"] = n * mi;
  out.reference["kelly_growth"] = kl + mi;
  if (px[0] > 0.0) out.reference["kelly_fraction_plus"] = kelly_binary(cell[0][0] / px[0], s.R, s.Rbar);
  if (px[1] > 0.0) out.reference["kelly_fraction_minus"] = kelly_binary(cell[1][0] / px[1], s.R, s.Rbar);
  // gamma* = sum_{x,y} P(x|y) P(y|x).
  CompensatedSum gamma;
  const double py[2] = {p, pb};
  for (int x = 0; x < 2; ++x) {
    for (int y = 0; y < 2; ++y) {
      if (cell[x][y] > 0.0) gamma += (cell[x][y] / py[y]) * (cell[x][y] / px[x]);
    }
  }
  out.reference["efficacy_kelly"] = gamma.value();
  return out;
}

// Flip kernel shared by the Markov and theta coins: uniform first face.
void flip_row(Window y, double flip, Row row) {
  if (y.empty()) {
    row[0] = 0.5;
    row[1] = 0.5;
    return;
  }
  const int stay = y.back();
  row[stay] = 1.0 - flip;
  row[1 - stay] = flip;
}

Scenario build_markov(const MarkovCoin& s) {
  require_probability(s.eps, "eps");
  require_games(s.n);
  const auto game = GameSpec::even_money();
  auto model = ProcessModel::without_side_information(
      s.n, binary_alphabet(game), Memory::markov(1, 0),
      [&](Window y, Window, Row row) { flip_row(y, s.eps, row); });
  Scenario out{"markov-coin", std::move(model), game, {}};
  const double n = static_cast<double>(s.n);
  const double s2 = binary_entropy(s.eps);
  out.reference["entropy"] = (n - 1.0) * s2 + std::log(2.0);
  out.reference["kelly_growth"] = (n - 1.0) / n * (std::log(2.0) - s2);
  out.reference["directed_information"] = 0.0;
  if (s.eps > 0.0 && s.eps < 1.0) out.reference["beta_J"] = ising_map(s.eps, s.n).beta_J;
  return out;
}

Scenario build_theta(const ThetaCoin& s) {
  require_games(s.n);
  const auto grid = theta_grid(s.p, s.sigma, s.K, s.delta);
  const auto game = GameSpec::even_money();
  auto model = ProcessModel::stationary(
      s.n, binary_alphabet(game), Alphabet::indexed(s.K), Memory::markov(1, 1),
      [&](Window y, Window x, Row row) { flip_row(y, grid.theta[static_cast<std::size_t>(x.back())], row); },
      Memory::markov(0, 0), [&](Window, Window, Row row) {
        for (std::size_t k = 0; k < row.size(); ++k) row[k] = grid.weights[k];
      });
  Scenario out{"theta-coin", std::move(model), game, {}};
  const double n = static_cast<double>(s.n);
  const double ln2 = std::log(2.0);
  out.reference["p_eff"] = grid.p_eff;
  out.reference["sigma2_eff"] = grid.sigma2_eff;
  out.reference["mean_binary_entropy"] = grid.mean_binary_entropy;
  out.reference["entropy"] = (n - 1.0) * binary_entropy(grid.p_eff) + ln2;
  out.reference["directed_information"] =
      (n - 1.0) * (binary_entropy(grid.p_eff) - grid.mean_binary_entropy);
  out.reference["directed_information_approx"] = idr_gaussian_approx(grid.p_eff, grid.sigma2_eff, s.n);
  out.reference["kelly_growth"] = (n - 1.0) / n * ln2 - (n - 1.0) / n * grid.mean_binary_entropy;
  if (grid.p_eff > 0.0 && grid.p_eff < 1.0) {
    out.reference["efficacy_kelly"] = transfer_matrix_efficacy(grid.p_eff, grid.sigma2_eff, s.n);
  }
  return out;
}

Scenario build_horse(const HorseDemo& s) {
  require_games(s.n);
  if (s.M < 2) throw InvalidParameter("a horse race needs at least two horses");
  const std::size_t M = s.M;
  std::vector<double> initial = s.initial;
  if (initial.empty()) initial.assign(M, 1.0 / static_cast<double>(M));
  if (initial.size() != M) throw InvalidParameter("initial law must have M entries");
  validate_probability_row(initial, "initial law");
  const std::vector<double> transition = s.transition;
  if (!transition.empty()) {
    if (transition.size() != M * M) throw InvalidParameter("transition matrix must be M x M");
    for (std::size_t a = 0; a < M; ++a) {
      validate_probability_row(std::span<const double>(transition).subspan(a * M, M), "transition row");
    }
  }
  auto game = s.odds.empty() ? GameSpec::fair_uniform(M, s.n) : GameSpec::horse_race(M, s.n, s.odds);
  const Memory memory = transition.empty() ? Memory::markov(0, 0) : Memory::markov(1, 0);
  auto model = ProcessModel::without_side_information(
      s.n, Alphabet::indexed(M), memory, [&](Window y, Window, Row row) {
        for (std::size_t b = 0; b < M; ++b) {
          row[b] = y.empty() ? initial[b] : transition[static_cast<std::size_t>(y.back()) * M + b];
        }
      });
  Scenario out{"horse-demo", std::move(model), std::move(game), {}};
  out.reference["directed_information"] = 0.0;
  if (out.game.is_fair_uniform() && transition.empty()) {
    const double n = static_cast<double>(s.n);
    const double h = entropy(Distribution(initial));
    out.reference["entropy"] = n * h;
    out.reference["kelly_growth"] = std::log(static_cast<double>(M)) - h;
  }
  return out;
}

}  // namespace

Scenario build(const ScenarioSpec& spec) {
  return std::visit(
      [](const auto& s) -> Scenario {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, IidCoin>) return build_iid(s);
        if constexpr (std::is_same_v<T, NoisyInformant>) return build_informant(s);
        if constexpr (std::is_same_v<T, MarkovCoin>) return build_markov(s);
        if constexpr (std::is_same_v<T, ThetaCoin>) return build_theta(s);
        if constexpr (std::is_same_v<T, HorseDemo>) return build_horse(s);
      },
      spec);
}

ThetaGrid theta_grid(double p, double sigma, std::size_t K, double delta) {
  if (K < 2) throw InvalidParameter("theta grid needs K >= 2");
  if (!(delta > 0.0 && delta < 0.5)) throw InvalidParameter("delta must lie in (0, 1/2)");
  if (!(p > delta && p < 1.0 - delta)) throw InvalidParameter("p must lie in (delta, 1 - delta)");
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw InvalidParameter("sigma must be finite and >= 0");

  ThetaGrid grid;
  std::vector<double> weights(K);
  grid.theta.resize(K);
  if (sigma == 0.0) {
    for (std::size_t k = 0; k < K; ++k) {
      grid.theta[k] = p;
      weights[k] = 1.0 / static_cast<double>(K);
    }
  } else {
    const double lo = std::max(delta, p - 4.0 * sigma);
    const double hi = std::min(1.0 - delta, p + 4.0 * sigma);
    const double step = (hi - lo) / static_cast<double>(K - 1);
    CompensatedSum total;
    for (std::size_t k = 0; k < K; ++k) {
      grid.theta[k] = lo + step * static_cast<double>(k);
      const double z = (grid.theta[k] - p) / sigma;
      weights[k] = std::exp(-0.5 * z * z);
      total += weights[k];
    }
    for (double& w : weights) w /= total.value();
    // Absorb the renormalization residue into the heaviest point.
    CompensatedSum check;
    for (double w : weights) check += w;
    std::size_t heaviest = 0;
    for (std::size_t k = 1; k < K; ++k) {
      if (weights[k] > weights[heaviest]) heaviest = k;
    }
    weights[heaviest] += 1.0 - check.value();
  }
  grid.weights = Distribution(weights);
  CompensatedSum mean;
  CompensatedSum h;
  for (std::size_t k = 0; k < K; ++k) {
    mean += weights[k] * grid.theta[k];
    h += weights[k] * binary_entropy(grid.theta[k]);
  }
  grid.p_eff = mean.value();
  CompensatedSum var;
  for (std::size_t k = 0; k < K; ++k) {
    const double d = grid.theta[k] - grid.p_eff;
    var += weights[k] * d * d;
  }
  grid.sigma2_eff = var.value();
  grid.mean_binary_entropy = h.value();
  return grid;
}

std::array<std::array<double, 2>, 2> transfer_matrix(double p, double sigma2) {
  if (!(p > 0.0 && p < 1.0)) throw InvalidParameter("p must lie in (0, 1)");
  if (!(sigma2 >= 0.0)) throw InvalidParameter("sigma^2 must be >= 0");
  const double pb = 1.0 - p;
  const double stay = (pb * pb + sigma2) / pb;
  const double flip = (p * p + sigma2) / p;
  return {{{stay, flip}, {flip, stay}}};
}

double transfer_matrix_efficacy(double p, double sigma2, std::size_t n) {
  require_games(n);
  const auto B = transfer_matrix(p, sigma2);
  std::array<double, 2> v{0.5, 0.5};
  for (std::size_t i = 1; i < n; ++i) {
    v = {B[0][0] * v[0] + B[0][1] * v[1], B[1][0] * v[0] + B[1][1] * v[1]};
  }
  return std::pow(v[0] + v[1], 1.0 / static_cast<double>(n));
}

double idr_gaussian_approx(double p, double sigma2, std::size_t n) {
  require_games(n);
  if (!(p > 0.0 && p < 1.0)) throw InvalidParameter("p must lie in (0, 1)");
  return static_cast<double>(n - 1) * sigma2 / (2.0 * p * (1.0 - p));
}

double IsingMap::kernel(int y_next, int y_prev) const {
  return std::exp(beta_J * y_next * y_prev) / (2.0 * std::cosh(beta_J));
}

IsingMap ising_map(double eps, std::size_t n) {
  require_probability(eps, "eps", true);
  require_games(n);
  IsingMap map;
  map.n = n;
  map.beta_J = 0.5 * std::log((1.0 - eps) / eps);
  const double same = std::exp(map.beta_J);
  const double diff = std::exp(-map.beta_J);
  map.partition = 2.0 * std::pow(2.0 * std::cosh(map.beta_J), static_cast<double>(n - 1));

  // Right vectors T^k 1 for k = 0..n-1; spins ordered (+1, -1).
  std::vector<std::array<double, 2>> right(n);
  right[0] = {1.0, 1.0};
  for (std::size_t k = 1; k < n; ++k) {
    const auto& r = right[k - 1];
    right[k] = {same * r[0] + diff * r[1], diff * r[0] + same * r[1]};
  }
  map.trace = right[n - 1][0] + right[n - 1][1];

  // <y_i> = 1^T T^{i-1} S T^{n-i} 1 / Z with S = diag(+1, -1).
  CompensatedSum magnetization;
  std::array<double, 2> left{1.0, 1.0};
  for (std::size_t i = 0; i < n; ++i) {
    const auto& r = right[n - 1 - i];
    magnetization += (left[0] * r[0] - left[1] * r[1]) / map.partition;
    left = {left[0] * same + left[1] * diff, left[0] * diff + left[1] * same};
  }
  map.magnetization = magnetization.value() / static_cast<double>(n);
  return map;
}

}  // namespace kellylab::scenarios
