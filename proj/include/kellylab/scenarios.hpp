#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include "kellylab/betting.hpp"
#include "kellylab/distribution.hpp"
#include "kellylab/process_model.hpp"

namespace kellylab::scenarios {

/// n independent binary games won with probability p.
struct IidCoin {
  double p = 0.5;
  std::size_t n = 1;
  double R = 1.0;
  double Rbar = 1.0;
};

/// Binary games with a noisy tip x that equals the outcome with probability q.
struct NoisyInformant {
  double p = 0.5;
  double q = 0.8;
  std::size_t n = 1;
  double R = 1.0;
  double Rbar = 1.0;
};

/// Even-money coin that flips its face with probability eps between games.
struct MarkovCoin {
  double eps = 0.3;
  std::size_t n = 8;
};

/// Markov coin whose flip probability theta_i is drawn afresh each game from
/// a discretized Gaussian and revealed to the gambler as side information.
struct ThetaCoin {
  double p = 0.5;
  double sigma = 0.05;
  std::size_t K = 9;
  double delta = 0.01;
  std::size_t n = 4;
};

/// M-horse race with a first-order Markov winner sequence.
struct HorseDemo {
  std::size_t M = 3;
  std::size_t n = 3;
  /// Odds per horse; empty means fair uniform odds o = M.
  std::vector<double> odds;
  /// Law of the first winner; empty means uniform.
  std::vector<double> initial;
  /// Row-major M x M transition matrix; empty means independent races
  /// drawn from `initial`.
  std::vector<double> transition;
};

using ScenarioSpec = std::variant<IidCoin, NoisyInformant, MarkovCoin, ThetaCoin, HorseDemo>;

struct Scenario {
  std::string kind;
  ProcessModel model;
  GameSpec game;
  /// Closed-form values for this scenario, keyed by name.
  std::map<std::string, double> reference;
};

Scenario build(const ScenarioSpec& spec);

/// Discretized Gaussian over flip probabilities.
struct ThetaGrid {
  std::vector<double> theta;
  Distribution weights;
  double p_eff = 0.0;
  double sigma2_eff = 0.0;
  /// <S_2(theta)> over the grid.
  double mean_binary_entropy = 0.0;
};

/// K equispaced points on [max(delta, p - 4 sigma), min(1 - delta, p + 4 sigma)]
/// weighted by the Gaussian density and renormalized. For sigma = 0 every
/// point sits at p with equal weight.
ThetaGrid theta_grid(double p, double sigma, std::size_t K, double delta);

/// Two-by-two matrix [[(pbar^2 + s2)/pbar, (p^2 + s2)/p], [(p^2 + s2)/p, (pbar^2 + s2)/pbar]].
std::array<std::array<double, 2>, 2> transfer_matrix(double p, double sigma2);

/// gamma* from the product of transfer matrices, (1/2, 1/2) start vector.
double transfer_matrix_efficacy(double p, double sigma2, std::size_t n);

/// (n - 1) sigma^2 / (2 p pbar); valid for small sigma.
double idr_gaussian_approx(double p, double sigma2, std::size_t n);

/// Open Ising chain equivalent to the Markov coin.
struct IsingMap {
  double beta_J = 0.0;
  std::size_t n = 0;
  /// 2 (2 cosh beta J)^{n-1}.
  double partition = 0.0;
  /// sum over spin configurations of exp(beta J sum_i y_i y_{i+1}).
  double trace = 0.0;
  /// (1/n) sum_i <y_i> from the transfer matrix.
  double magnetization = 0.0;

  /// exp(beta J y' y) / (2 cosh beta J).
  double kernel(int y_next, int y_prev) const;
};

IsingMap ising_map(double eps, std::size_t n);

}  // namespace kellylab::scenarios
