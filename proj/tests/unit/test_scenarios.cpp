#include <doctest.h>

#include <cmath>

#include "kellylab/equalities.hpp"
#include "kellylab/error.hpp"
#include "kellylab/information.hpp"
#include "kellylab/scenarios.hpp"
#include "kellylab/sequence.hpp"
#include "support/random_models.hpp"

using namespace kellylab;
namespace ks = kellylab::scenarios;
using kellylab::testing::Rng;

namespace {

const double kLn2 = std::log(2.0);
// 0.5 ln(7/3), frozen.
constexpr double kBetaJ03 = 0.423648930193602;
// 1.04^0.8, frozen.
constexpr double kTransferP05 = 1.03187400406607;

double s2(double p) {
  if (p <= 0.0 || p >= 1.0) return 0.0;
  return -p * std::log(p) - (1 - p) * std::log(1 - p);
}

// Direct moments of a grid, independent of the library's bookkeeping.
struct Moments {
  double mean = 0.0;
  double var = 0.0;
};

Moments grid_moments(const ks::ThetaGrid& grid) {
  Moments m;
  for (std::size_t k = 0; k < grid.theta.size(); ++k) m.mean += grid.weights.probs()[k] * grid.theta[k];
  for (std::size_t k = 0; k < grid.theta.size(); ++k) {
    const double d = grid.theta[k] - m.mean;
    m.var += grid.weights.probs()[k] * d * d;
  }
  return m;
}

void check_model_consistency(const ProcessModel& model) {
  const auto joint = joint_sequence(model);
  double total = 0.0;
  for (double p : joint.probs()) total += p;
  CHECK(std::abs(total - 1.0) <= 1e-10);
  const auto a = causal_factor(joint, Direction::x_given_y, 0);
  const auto b = causal_factor(joint, Direction::y_given_x, 1);
  for (std::uint64_t i = 0; i < joint.size(); ++i) {
    const double p = joint.prob(i);
    if (p == 0.0) continue;
    CHECK(std::abs(a[i] * b[i] - p) <= 1e-12 * p);
  }
}

}  // namespace

TEST_CASE("every scenario yields a consistent model") {
  check_model_consistency(ks::build(ks::IidCoin{0.3, 4, 2.0, 0.5}).model);
  check_model_consistency(ks::build(ks::NoisyInformant{0.4, 0.9, 3}).model);
  check_model_consistency(ks::build(ks::MarkovCoin{0.2, 6}).model);
  check_model_consistency(ks::build(ks::ThetaCoin{0.4, 0.05, 4, 0.01, 3}).model);
  ks::HorseDemo horse;
  horse.transition = {0.5, 0.25, 0.25, 0.1, 0.8, 0.1, 0.3, 0.3, 0.4};
  check_model_consistency(ks::build(horse).model);
}

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS(ks::build(ks::IidCoin{1.5}), InvalidParameter);
  CHECK_THROWS_AS(ks::build(ks::IidCoin{0.5, 0}), InvalidParameter);
  CHECK_THROWS_AS(ks::build(ks::NoisyInformant{0.5, -0.1}), InvalidParameter);
  CHECK_THROWS_AS(ks::build(ks::MarkovCoin{1.2, 3}), InvalidParameter);
  CHECK_THROWS_AS(ks::build(ks::ThetaCoin{0.5, 0.05, 1}), InvalidParameter);
  CHECK_THROWS_AS(ks::build(ks::ThetaCoin{0.005, 0.05, 5, 0.01}), InvalidParameter);
  CHECK_THROWS_AS(ks::build(ks::ThetaCoin{0.5, -0.1}), InvalidParameter);
  ks::HorseDemo bad;
  bad.M = 1;
  CHECK_THROWS_AS(ks::build(bad), InvalidParameter);
  bad.M = 3;
  bad.transition = {0.5, 0.5};
  CHECK_THROWS_AS(ks::build(bad), InvalidParameter);
  CHECK_THROWS_AS(ks::ising_map(0.0, 3), InvalidParameter);
  CHECK_THROWS_AS(ks::ising_map(1.0, 3), InvalidParameter);
}

TEST_CASE("markov coin examples") {
  SUBCASE("eps = 1/2 is a fair iid coin") {
    const auto markov = ks::build(ks::MarkovCoin{0.5, 4});
    const auto iid = ks::build(ks::IidCoin{0.5, 4});
    const auto a = outcome_marginal(joint_sequence(markov.model));
    const auto b = outcome_marginal(joint_sequence(iid.model));
    for (std::size_t k = 0; k < a.size(); ++k) CHECK(a[k] == doctest::Approx(b[k]).epsilon(1e-15));
    const auto bounds = jensen_bounds(markov.model, markov.game);
    CHECK(std::abs(bounds.rhs) < 1e-15);
    CHECK(std::abs(bounds.kelly_growth) < 1e-15);
  }
  SUBCASE("entropy") {
    for (std::size_t n : {1u, 4u, 10u}) {
      const auto s = ks::build(ks::MarkovCoin{0.3, n});
      const double expected = static_cast<double>(n - 1) * s2(0.3) + kLn2;
      CHECK(sequence_entropy(joint_sequence(s.model)) == doctest::Approx(expected).epsilon(1e-13));
      CHECK(s.reference.at("entropy") == doctest::Approx(expected).epsilon(1e-15));
    }
  }
  SUBCASE("first face is uniform") {
    const auto s = ks::build(ks::MarkovCoin{0.2, 3});
    const int x[1] = {0};
    const auto row = s.model.outcome_row(0, {}, x);
    CHECK(row[0] == 0.5);
    CHECK(row[1] == 0.5);
  }
}

TEST_CASE("markov coin kelly growth") {
  for (double eps : {0.1, 0.3, 0.45}) {
    for (std::size_t n = 2; n <= 10; ++n) {
      const auto s = ks::build(ks::MarkovCoin{eps, n});
      const auto kelly = kelly_strategy(s.model, s.game);
      const ExactEnsemble ensemble(s.model, s.game);
      const auto lw = ensemble.log_wealth(kelly);
      const double mean = ensemble.average([&](std::size_t k) { return lw[k]; }) / static_cast<double>(n);
      const double expected = static_cast<double>(n - 1) / static_cast<double>(n) * (kLn2 - s2(eps));
      CHECK(std::abs(mean - expected) <= 1e-10);
      CHECK(std::abs(s.reference.at("kelly_growth") - expected) <= 1e-15);
    }
  }
}

TEST_CASE("noisy informant table") {
  const auto s = ks::build(ks::NoisyInformant{0.5, 0.8});
  const auto joint = joint_sequence(s.model);
  auto cell = [&](int x, int y) {
    const int xs[1] = {x};
    const int ys[1] = {y};
    return joint.prob(joint.encode(xs, ys));
  };
  // x agrees with y: win 0.4, lose 0.4; x disagrees: 0.1 each.
  CHECK(cell(0, 0) == doctest::Approx(0.4).epsilon(1e-15));
  CHECK(cell(1, 1) == doctest::Approx(0.4).epsilon(1e-15));
  CHECK(cell(1, 0) == doctest::Approx(0.1).epsilon(1e-15));
  CHECK(cell(0, 1) == doctest::Approx(0.1).epsilon(1e-15));
  CHECK(s.reference.at("kelly_fraction_plus") == doctest::Approx(0.6).epsilon(1e-14));
  CHECK(s.reference.at("kelly_fraction_minus") == doctest::Approx(-0.6).epsilon(1e-14));
  CHECK(s.reference.at("efficacy_kelly") == doctest::Approx(1.36).epsilon(1e-14));
}

TEST_CASE("noisy informant kelly growth") {
  Rng rng(71);
  for (int trial = 0; trial < 100; ++trial) {
    const double p = testing::uniform(rng, 0.05, 0.95);
    const double q = testing::uniform(rng, 0.05, 0.95);
    const auto s = ks::build(ks::NoisyInformant{p, q});
    const auto joint = joint_sequence(s.model);
    const auto b = jensen_bounds(s.model, s.game);
    const double expected = kLn2 - s2(p) + mutual_information(joint);
    CHECK(std::abs(b.kelly_growth - expected) <= 1e-12);
    CHECK(std::abs(s.reference.at("kelly_growth") - expected) <= 1e-12);
    CHECK(std::abs(s.reference.at("mutual_information") - mutual_information(joint)) <= 1e-12);
  }
}

TEST_CASE("theta grid examples") {
  SUBCASE("two points") {
    const auto g = ks::theta_grid(0.5, 0.05, 2, 0.01);
    REQUIRE(g.theta.size() == 2);
    const double spacing = g.theta[1] - g.theta[0];
    CHECK(g.weights.probs()[0] == doctest::Approx(0.5));
    CHECK(g.sigma2_eff == doctest::Approx(spacing * spacing / 4.0).epsilon(1e-12));
    CHECK(g.p_eff == doctest::Approx(0.5).epsilon(1e-15));
  }
  SUBCASE("nominal grid") {
    const auto g = ks::theta_grid(0.5, 0.05, 9, 0.01);
    const auto m = grid_moments(g);
    CHECK(std::abs(m.var - 0.0025) / 0.0025 < 0.02);
    CHECK(g.sigma2_eff == doctest::Approx(m.var).epsilon(1e-12));
    CHECK(g.p_eff == doctest::Approx(m.mean).epsilon(1e-14));
    double h = 0.0;
    for (std::size_t k = 0; k < 9; ++k) h += g.weights.probs()[k] * s2(g.theta[k]);
    CHECK(g.mean_binary_entropy == doctest::Approx(h).epsilon(1e-13));
    for (double t : g.theta) {
      CHECK(t >= 0.01);
      CHECK(t <= 0.99);
    }
  }
  SUBCASE("truncation near the edge") {
    const auto g = ks::theta_grid(0.05, 0.05, 7, 0.02);
    for (double t : g.theta) CHECK(t >= 0.02);
    CHECK(g.theta.front() == doctest::Approx(0.02));
  }
  SUBCASE("sigma to zero") {
    const auto small = ks::theta_grid(0.3, 1e-6, 3, 0.01);
    CHECK(small.sigma2_eff < 1e-11);
    const auto zero = ks::theta_grid(0.3, 0.0, 3, 0.01);
    CHECK(zero.sigma2_eff == 0.0);
    CHECK(zero.p_eff == 0.3);
    const auto s = ks::build(ks::ThetaCoin{0.3, 0.0, 3, 0.01, 4});
    CHECK(std::abs(directed_information(joint_sequence(s.model))) < 1e-14);
  }
}

TEST_CASE("theta coin kelly growth and information") {
  for (double sigma : {0.02, 0.05, 0.1}) {
    for (std::size_t K : {3u, 5u}) {
      for (std::size_t n : {2u, 4u}) {
        const auto s = ks::build(ks::ThetaCoin{0.4, sigma, K, 0.01, n});
        const auto grid = ks::theta_grid(0.4, sigma, K, 0.01);
        const auto b = jensen_bounds(s.model, s.game);
        const double nd = static_cast<double>(n);
        const double expected = (nd - 1) / nd * kLn2 - (nd - 1) / nd * grid.mean_binary_entropy;
        CHECK(std::abs(b.kelly_growth - expected) <= 1e-10);
        CHECK(b.kelly_saturates);
        const double idr = directed_information(joint_sequence(s.model));
        CHECK(std::abs(s.reference.at("directed_information") - idr) <= 1e-12);
        CHECK(std::abs(s.reference.at("entropy") - sequence_entropy(joint_sequence(s.model))) <= 1e-12);
      }
    }
  }
}

TEST_CASE("transfer matrix efficacy") {
  CHECK(ks::transfer_matrix_efficacy(0.3, 0.0, 6) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(std::abs(ks::transfer_matrix_efficacy(0.5, 0.01, 5) - kTransferP05) < 1e-14);
  CHECK(std::abs(std::pow(1.04, 0.8) - kTransferP05) < 1e-14);
  const auto B = ks::transfer_matrix(0.3, 0.01);
  CHECK(B[0][0] == doctest::Approx((0.49 + 0.01) / 0.7));
  CHECK(B[0][1] == doctest::Approx((0.09 + 0.01) / 0.3));
  CHECK(B[0][0] + B[0][1] == doctest::Approx(1.0 + 0.01 / 0.21));

  SUBCASE("matches enumeration with effective moments") {
    for (double p : {0.3, 0.5}) {
      for (double sigma : {0.03, 0.08}) {
        for (std::size_t n : {1u, 3u, 5u}) {
          const auto s = ks::build(ks::ThetaCoin{p, sigma, 5, 0.01, n});
          const auto grid = ks::theta_grid(p, sigma, 5, 0.01);
          const double enumerated = efficacy_kelly(s.model);
          CHECK(std::abs(ks::transfer_matrix_efficacy(grid.p_eff, grid.sigma2_eff, n) - enumerated) <= 1e-10);
          CHECK(std::abs(s.reference.at("efficacy_kelly") - enumerated) <= 1e-10);
        }
      }
    }
  }
  SUBCASE("leading-order relation to directed information") {
    // The error of gamma* = (1 + 2 I/(n-1))^{1-1/n} is higher order in sigma^2.
    auto error = [](double sigma) {
      const auto s = ks::build(ks::ThetaCoin{0.5, sigma, 9, 0.01, 4});
      const double idr = directed_information(joint_sequence(s.model));
      const double lhs = efficacy_kelly(s.model);
      const double rhs = std::pow(1.0 + 2.0 * idr / 3.0, 0.75);
      return std::abs(lhs - rhs) / (lhs - 1.0);
    };
    const double coarse = error(0.04);
    const double fine = error(0.02);
    CHECK(coarse < 0.05);
    CHECK(fine < coarse / 3.0);
  }
}

TEST_CASE("gaussian approximation of the directed information") {
  CHECK(ks::idr_gaussian_approx(0.5, 0.0, 5) == 0.0);
  CHECK(ks::idr_gaussian_approx(0.5, 0.0025, 11) == doctest::Approx(0.05).epsilon(1e-14));
  const auto s = ks::build(ks::ThetaCoin{0.5, 0.02, 9, 0.01, 4});
  const double exact = directed_information(joint_sequence(s.model));
  const double approx = ks::idr_gaussian_approx(0.5, 0.02 * 0.02, 4);
  CHECK(std::abs(approx - exact) / exact < 0.05);
  CHECK(std::abs(s.reference.at("directed_information_approx") - exact) / exact < 0.05);
}

TEST_CASE("ising map") {
  SUBCASE("infinite temperature") {
    const auto m = ks::ising_map(0.5, 4);
    CHECK(m.beta_J == 0.0);
    CHECK(m.kernel(1, 1) == 0.5);
    CHECK(m.kernel(-1, 1) == 0.5);
  }
  SUBCASE("eps = 0.3") {
    const auto m = ks::ising_map(0.3, 10);
    CHECK(std::abs(m.beta_J - kBetaJ03) < 1e-15);
    CHECK(m.kernel(1, 1) == doctest::Approx(0.7).epsilon(1e-15));
    CHECK(m.kernel(-1, 1) == doctest::Approx(0.3).epsilon(1e-15));
    CHECK(m.kernel(-1, -1) == doctest::Approx(0.7).epsilon(1e-15));
    CHECK(std::abs(m.trace / m.partition - 1.0) <= 1e-12);
    CHECK(std::abs(m.magnetization) <= 1e-14);
    CHECK(ks::build(ks::MarkovCoin{0.3, 10}).reference.at("beta_J") == m.beta_J);
  }
  SUBCASE("boltzmann weights reproduce the markov coin") {
    for (double eps : {0.1, 0.3, 0.7}) {
      const std::size_t n = 6;
      const auto m = ks::ising_map(eps, n);
      const auto s = ks::build(ks::MarkovCoin{eps, n});
      const auto py = outcome_marginal(joint_sequence(s.model));
      double total = 0.0;
      for (std::size_t code = 0; code < py.size(); ++code) {
        // y_1 is the most significant digit; index 0 is heads (+1).
        std::vector<int> spin(n);
        for (std::size_t i = 0; i < n; ++i) spin[i] = ((code >> (n - 1 - i)) & 1u) ? -1 : 1;
        double energy = 0.0;
        for (std::size_t i = 0; i + 1 < n; ++i) energy += spin[i] * spin[i + 1];
        const double boltzmann = std::exp(m.beta_J * energy) / m.partition;
        CHECK(py[code] == doctest::Approx(boltzmann).epsilon(1e-13));
        total += boltzmann;
      }
      CHECK(std::abs(total - 1.0) <= 1e-12);
      CHECK(std::abs(m.trace / m.partition - 1.0) <= 1e-12);
    }
  }
}

TEST_CASE("horse demo") {
  const auto s = ks::build(ks::HorseDemo{});
  CHECK(s.game.is_fair_uniform());
  CHECK(s.reference.at("kelly_growth") == doctest::Approx(0.0).epsilon(1e-15));
  ks::HorseDemo skewed;
  skewed.initial = {0.5, 0.3, 0.2};
  const auto t = ks::build(skewed);
  const auto b = jensen_bounds(t.model, t.game);
  CHECK(b.kelly_growth == doctest::Approx(t.reference.at("kelly_growth")).epsilon(1e-13));
  CHECK(sequence_entropy(joint_sequence(t.model)) == doctest::Approx(t.reference.at("entropy")).epsilon(1e-13));
}
