#include <doctest.h>

#include <cmath>

#include "kellylab/distribution.hpp"
#include "kellylab/error.hpp"
#include "kellylab/information.hpp"
#include "kellylab/scenarios.hpp"
#include "kellylab/sequence.hpp"
#include "support/oracles.hpp"
#include "support/random_models.hpp"

using namespace kellylab;
namespace ks = kellylab::scenarios;
using kellylab::testing::Rng;

namespace {

const double kLn2 = std::log(2.0);

// -0.3 ln 0.3 - 0.7 ln 0.7 at 30 digits, frozen.
constexpr double kS2_03 = 0.610864302054893;
// ln 2 - S_2(0.6), frozen.
constexpr double kKl06 = 0.0201355135506889;
// Mutual information of the informant joint with p = 0.5, q = 0.8, frozen.
constexpr double kMiInformant = 0.192744757021757;

ProcessModel iid_binary(double p, std::size_t n) {
  return ProcessModel::without_side_information(
      n, Alphabet({"H", "T"}), Memory::markov(0, 0),
      [p](std::span<const int>, std::span<const int>, std::span<double> row) {
        row[0] = p;
        row[1] = 1.0 - p;
      });
}

// y_i copies x_i through a binary symmetric channel; x_i i.i.d.
ProcessModel memoryless_channel(double px, double flip, std::size_t n) {
  return ProcessModel::stationary(
      n, Alphabet({"a", "b"}), Alphabet({"u", "v"}), Memory::markov(0, 1),
      [flip](std::span<const int>, std::span<const int> x, std::span<double> row) {
        row[static_cast<std::size_t>(x.back())] = 1.0 - flip;
        row[static_cast<std::size_t>(1 - x.back())] = flip;
      },
      Memory::markov(0, 0), [px](std::span<const int>, std::span<const int>, std::span<double> row) {
        row[0] = px;
        row[1] = 1.0 - px;
      });
}

}  // namespace

TEST_CASE("alphabet validation") {
  CHECK_THROWS_AS(Alphabet(std::vector<std::string>{}), InvalidParameter);
  CHECK_THROWS_AS(Alphabet({"a", "a"}), InvalidParameter);
  CHECK_THROWS_AS(Alphabet({"a,b"}), InvalidParameter);
  CHECK_THROWS_AS(Alphabet({"a|b"}), InvalidParameter);
  const Alphabet a({"up", "down"});
  CHECK(a.size() == 2);
  CHECK(a.index_of("down") == 1);
}

TEST_CASE("distribution validation") {
  CHECK_THROWS_AS(Distribution({0.5, 0.6}), InvalidDistribution);
  CHECK_THROWS_AS(Distribution({-0.1, 1.1}), InvalidDistribution);
  CHECK_NOTHROW(Distribution({0.25, 0.75}));
}

TEST_CASE("entropy") {
  CHECK(entropy(Distribution({0.5, 0.5})) == doctest::Approx(kLn2).epsilon(1e-15));
  CHECK(entropy(Distribution({1.0, 0.0})) == 0.0);
  CHECK(std::abs(entropy(Distribution({0.3, 0.7})) - kS2_03) < 1e-15);
  CHECK(std::abs(binary_entropy(0.3) - kS2_03) < 1e-15);
}

TEST_CASE("kl divergence") {
  const auto u = Distribution::uniform(2);
  CHECK(kl_divergence(u, u) == 0.0);
  const Distribution p({0.6, 0.4});
  CHECK(std::abs(kl_divergence(p, u) - kKl06) < 1e-15);
  CHECK(std::abs(kl_divergence(p, u) - (kLn2 - binary_entropy(0.6))) < 1e-15);
  CHECK(kl_divergence(Distribution::point_mass(2, 0), u) == doctest::Approx(kLn2));
  CHECK_THROWS_AS(kl_divergence(u, Distribution::point_mass(2, 0)), AbsoluteContinuityViolation);
}

TEST_CASE("mutual information of one pair") {
  SUBCASE("product joint") {
    const auto joint = joint_sequence(memoryless_channel(0.3, 0.5, 1));
    CHECK(std::abs(mutual_information(joint)) < 1e-15);
  }
  SUBCASE("perfect copy") {
    const auto joint = joint_sequence(memoryless_channel(0.5, 0.0, 1));
    CHECK(mutual_information(joint) == doctest::Approx(kLn2).epsilon(1e-14));
  }
  SUBCASE("informant table") {
    const auto s = ks::build(ks::NoisyInformant{0.5, 0.8});
    const auto joint = joint_sequence(s.model);
    CHECK(std::abs(mutual_information(joint) - kMiInformant) < 1e-14);
    // Symmetric in x and y: same value from the 4-cell formula.
    double direct = 0.0;
    const double cells[2][2] = {{0.4, 0.1}, {0.1, 0.4}};
    for (auto& row : cells) {
      for (double c : row) direct += c * std::log(c / 0.25);
    }
    CHECK(std::abs(mutual_information(joint) - direct) < 1e-15);
  }
}

TEST_CASE("joint sequence examples") {
  SUBCASE("one game") {
    const auto joint = joint_sequence(iid_binary(0.3, 1));
    REQUIRE(joint.size() == 2);
    CHECK(joint.prob(0) == doctest::Approx(0.3));
    CHECK(joint.prob(1) == doctest::Approx(0.7));
  }
  SUBCASE("iid product") {
    const auto joint = joint_sequence(iid_binary(0.3, 2));
    std::vector<int> xs(2, 0);
    for (int a = 0; a < 2; ++a) {
      for (int b = 0; b < 2; ++b) {
        const int ys[2] = {a, b};
        const double expected = (a == 0 ? 0.3 : 0.7) * (b == 0 ? 0.3 : 0.7);
        CHECK(joint.prob(joint.encode(xs, ys)) == doctest::Approx(expected).epsilon(1e-15));
      }
    }
  }
  SUBCASE("markov coin") {
    const auto s = ks::build(ks::MarkovCoin{0.3, 3});
    const auto joint = joint_sequence(s.model);
    const int xs[3] = {0, 0, 0};
    const int ys[3] = {0, 0, 0};
    CHECK(joint.prob(joint.encode(xs, ys)) == doctest::Approx(0.245).epsilon(1e-15));
  }
}

TEST_CASE("enumeration cap") {
  const auto model = iid_binary(0.5, 10);
  CHECK_THROWS_AS(joint_sequence(model, {1000}), EnumerationTooLarge);
  CHECK_NOTHROW(joint_sequence(model, {1024}));
}

TEST_CASE("joint matches a brute-force kernel product on random models") {
  Rng rng(11);
  testing::ModelShape shape;
  shape.max_sequences = 2000;
  for (int trial = 0; trial < 100; ++trial) {
    const auto model = testing::random_model(rng, shape);
    const auto joint = joint_sequence(model);
    const auto paths = testing::brute_force_paths(model);
    REQUIRE(paths.size() == joint.size());
    double total = 0.0;
    for (const auto& p : paths) {
      CHECK(std::abs(joint.prob(joint.encode(p.xs, p.ys)) - p.p) <= 1e-14);
      total += p.p;
    }
    CHECK(std::abs(total - 1.0) < 1e-10);
  }
}

TEST_CASE("causal factors against prefix-ratio oracle") {
  Rng rng(12);
  testing::ModelShape shape;
  shape.max_sequences = 600;
  shape.max_n = 4;
  for (int trial = 0; trial < 30; ++trial) {
    const auto model = testing::random_model(rng, shape);
    const auto joint = joint_sequence(model);
    const auto paths = testing::brute_force_paths(model);
    const auto y_given_x = causal_factor(joint, Direction::y_given_x, 0);
    const auto x_given_y1 = causal_factor(joint, Direction::x_given_y, 1);
    const auto x_given_y0 = causal_factor(joint, Direction::x_given_y, 0);
    const auto y_given_x1 = causal_factor(joint, Direction::y_given_x, 1);
    for (const auto& p : paths) {
      if (p.p == 0.0) continue;
      const auto idx = joint.encode(p.xs, p.ys);
      CHECK(y_given_x[idx] == doctest::Approx(testing::brute_causal_y_given_x(paths, p)).epsilon(1e-10));
      CHECK(x_given_y1[idx] == doctest::Approx(testing::brute_causal_x_given_y(paths, p, 1)).epsilon(1e-10));
      // Both chain-rule orderings reproduce the joint.
      CHECK(std::abs(x_given_y1[idx] * y_given_x[idx] - p.p) <= 1e-12 * p.p);
      CHECK(std::abs(x_given_y0[idx] * y_given_x1[idx] - p.p) <= 1e-12 * p.p);
    }
  }
}

TEST_CASE("causal factor examples") {
  SUBCASE("independent x and y") {
    const auto joint = joint_sequence(memoryless_channel(0.3, 0.5, 3));
    const auto factor = causal_factor(joint, Direction::x_given_y, 0);
    const std::vector<bool> keep_x{true, false, true, false, true, false};
    const auto px = marginal(joint, keep_x);
    std::vector<int> digits(6);
    for (std::uint64_t i = 0; i < joint.size(); ++i) {
      joint.digits(i, digits);
      CHECK(factor[i] == doctest::Approx(px[project(joint, digits, keep_x)]).epsilon(1e-12));
    }
  }
  SUBCASE("zero-probability prefix is reported") {
    const auto joint = joint_sequence(memoryless_channel(1.0, 0.0, 2));
    const int xs[2] = {1, 0};
    const int ys[2] = {1, 0};
    CHECK_THROWS_AS(causal_factor(joint, Direction::y_given_x, 0, xs, ys), UndefinedConditional);
  }
  SUBCASE("theta coin factors match kernel products") {
    const auto s = ks::build(ks::ThetaCoin{0.5, 0.05, 3, 0.01, 2});
    const auto joint = joint_sequence(s.model);
    const auto factor = causal_factor(joint, Direction::y_given_x, 0);
    std::vector<int> xs(2);
    std::vector<int> ys(2);
    for (std::uint64_t i = 0; i < joint.size(); ++i) {
      if (joint.prob(i) == 0.0) continue;
      joint.decode(i, xs, ys);
      const double expected =
          s.model.outcome_row(0, {}, std::span<const int>(xs).first(1))[ys[0]] *
          s.model.outcome_row(1, std::span<const int>(ys).first(1), xs)[ys[1]];
      CHECK(factor[i] == doctest::Approx(expected).epsilon(1e-13));
    }
  }
}

TEST_CASE("directed information examples") {
  SUBCASE("y independent of x") {
    const auto joint = joint_sequence(memoryless_channel(0.4, 0.5, 3));
    CHECK(std::abs(directed_information(joint)) < 1e-14);
  }
  SUBCASE("memoryless channel adds up") {
    const auto one = joint_sequence(memoryless_channel(0.4, 0.2, 1));
    const auto three = joint_sequence(memoryless_channel(0.4, 0.2, 3));
    CHECK(directed_information(three) == doctest::Approx(3.0 * mutual_information(one)).epsilon(1e-12));
  }
}

TEST_CASE("entropies") {
  SUBCASE("deterministic") {
    CHECK(sequence_entropy(joint_sequence(iid_binary(1.0, 4))) == 0.0);
  }
  SUBCASE("markov coin") {
    for (std::size_t n : {1u, 2u, 5u, 9u}) {
      const auto s = ks::build(ks::MarkovCoin{0.3, n});
      const double expected = static_cast<double>(n - 1) * kS2_03 + kLn2;
      CHECK(sequence_entropy(joint_sequence(s.model)) == doctest::Approx(expected).epsilon(1e-13));
    }
  }
  SUBCASE("iid additivity") {
    CHECK(sequence_entropy(joint_sequence(iid_binary(0.3, 6))) ==
          doctest::Approx(6.0 * kS2_03).epsilon(1e-13));
  }
}

TEST_CASE("information measures on random models") {
  Rng rng(13);
  for (int trial = 0; trial < 150; ++trial) {
    const auto model = testing::random_model(rng, {});
    const auto joint = joint_sequence(model);
    double total = 0.0;
    for (double p : joint.probs()) total += p;
    CHECK(std::abs(total - 1.0) <= 1e-10);
    const double s = sequence_entropy(joint);
    const double sc = causally_conditional_entropy(joint);
    const double idr = directed_information(joint);
    CHECK(s >= -1e-12);
    CHECK(mutual_information(joint) >= -1e-12);
    CHECK(idr >= -1e-12);
    CHECK(std::abs((s - sc) - idr) <= 1e-10);
  }
}

TEST_CASE("marginal consistency when x does not reach y") {
  Rng rng(14);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = testing::pick(rng, 1, 4);
    const auto y_rows = [&rng](std::span<const int>, std::span<const int>, std::span<double> row) {
      const auto r = testing::random_row(rng, row.size(), 0.0, 0.0);
      std::copy(r.begin(), r.end(), row.begin());
    };
    // Build the y-only model, then the same y-kernels with an x-process attached.
    const auto y_only = ProcessModel::without_side_information(n, Alphabet::indexed(3), Memory::markov(2, 0), y_rows);
    std::vector<ConditionalKernel> ys;
    std::vector<ConditionalKernel> xs;
    const ModelDims dims{3, 2};
    for (std::size_t i = 0; i < n; ++i) {
      const auto& source = y_only.y_kernel(i).table();
      ys.push_back(ConditionalKernel::filled(outcome_shape(dims, i), Memory::markov(2, 0),
                                             [&](std::span<const int> own, std::span<const int>, std::span<double> row) {
                                               const auto r = source.row(source.window_key(own, {}));
                                               std::copy(r.begin(), r.end(), row.begin());
                                             }));
      xs.push_back(ConditionalKernel::filled(side_shape(dims, i), Memory::full(), y_rows));
    }
    const ProcessModel with_x(n, Alphabet::indexed(3), Alphabet::indexed(2), ys, xs);
    const auto a = outcome_marginal(joint_sequence(y_only));
    const auto b = outcome_marginal(joint_sequence(with_x));
    REQUIRE(a.size() == b.size());
    for (std::size_t k = 0; k < a.size(); ++k) CHECK(std::abs(a[k] - b[k]) <= 1e-12);
  }
}
