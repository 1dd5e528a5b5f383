#include <doctest.h>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <string>

#include "kellylab/equalities.hpp"
#include "kellylab/error.hpp"
#include "kellylab/montecarlo.hpp"
#include "kellylab/scenarios.hpp"
#include "kellylab/sequence.hpp"
#include "kellylab/serialize.hpp"
#include "support/random_models.hpp"

using namespace kellylab;
namespace ks = kellylab::scenarios;
using kellylab::testing::Rng;
using nlohmann::json;

namespace {

std::string schema_message(const std::string& text) {
  try {
    parse_json_text(text, "model.json");
  } catch (const SchemaError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("model round trip on random models") {
  Rng rng(91);
  testing::ModelShape shape;
  shape.max_sequences = 3000;
  for (int trial = 0; trial < 80; ++trial) {
    const auto model = testing::random_model(rng, shape);
    const auto first = to_json(model);
    // Through text, as a file would go.
    const auto loaded = model_from_json(json::parse(first.dump()));
    CHECK(to_json(loaded).dump() == first.dump());
    const auto ja = joint_sequence(loaded);
    const auto jb = joint_sequence(model);
    const auto a = ja.probs();
    const auto b = jb.probs();
    CHECK(std::equal(a.begin(), a.end(), b.begin(), b.end()));
  }
}

TEST_CASE("scenario models round trip") {
  const std::vector<ks::ScenarioSpec> specs{ks::IidCoin{0.6, 3}, ks::NoisyInformant{0.5, 0.8, 2},
                                            ks::MarkovCoin{0.3, 5}, ks::ThetaCoin{0.5, 0.05, 4, 0.01, 3}};
  for (const auto& spec : specs) {
    const auto s = ks::build(spec);
    const auto j = to_json(s.model);
    CHECK(j["schema"] == kSchemaVersion);
    CHECK(to_json(model_from_json(j)) == j);
  }
}

TEST_CASE("x kernels may be omitted for a trivial side alphabet") {
  const auto j = json::parse(R"({
    "n": 2, "y_alphabet": ["H", "T"],
    "y_kernels": [
      {"own_order": 0, "other_order": 0, "rows": {"|": [0.6, 0.4]}},
      {"own_order": 1, "other_order": 0, "rows": {"H|": [0.9, 0.1], "T|": [0.2, 0.8]}}
    ]})");
  const auto model = model_from_json(j);
  CHECK(model.x_alphabet().size() == 1);
  const auto py = outcome_marginal(joint_sequence(model));
  CHECK(py[0] == doctest::Approx(0.54).epsilon(1e-15));
  CHECK(py[3] == doctest::Approx(0.32).epsilon(1e-15));
  CHECK(to_json(model_from_json(to_json(model))) == to_json(model));
}

TEST_CASE("schema errors") {
  const auto good = to_json(ks::build(ks::MarkovCoin{0.3, 3}).model);
  auto bad = good;
  bad["schema"] = 2;
  CHECK_THROWS_AS(model_from_json(bad), SchemaError);
  bad = good;
  bad.erase("y_kernels");
  CHECK_THROWS_AS(model_from_json(bad), SchemaError);
  bad = good;
  bad["y_kernels"].erase(0);
  CHECK_THROWS_AS(model_from_json(bad), SchemaError);
  bad = good;
  bad["y_kernels"][0]["own_order"] = -1;
  CHECK_THROWS_AS(model_from_json(bad), SchemaError);
  bad = good;
  bad["y_kernels"][0]["rows"]["|"] = json::array({0.5});
  CHECK_THROWS_AS(model_from_json(bad), SchemaError);
  bad = good;
  bad["y_kernels"][0]["rows"]["|"] = json::array({0.7, 0.7});
  CHECK_THROWS_AS(model_from_json(bad), Error);
  bad = good;
  bad["y_alphabet"] = json::array({"a", "a"});
  CHECK_THROWS_AS(model_from_json(bad), SchemaError);
}

TEST_CASE("malformed JSON reports line and column") {
  const std::string text = "{\n  \"n\": 3,\n  \"y_alphabet\": [\"H\" \"T\"]\n}";
  const auto message = schema_message(text);
  CHECK(message.find("model.json:3:") == 0);
  CHECK(message.find("malformed JSON") != std::string::npos);
  CHECK(schema_message("{\"n\": }").find("model.json:1:7") == 0);
  CHECK(schema_message("{}").empty());
  CHECK_THROWS_AS(read_json_file("/nonexistent/kellylab.json"), SchemaError);
}

TEST_CASE("games round trip") {
  const auto binary = GameSpec::binary(1.5, 0.5);
  const auto model = ks::build(ks::IidCoin{0.6, 3}).model;
  CHECK(to_json(game_from_json(to_json(binary), model)) == to_json(binary));

  Rng rng(92);
  const auto horse_model = ks::build(ks::HorseDemo{}).model;
  const std::size_t M = horse_model.y_alphabet().size();
  for (int trial = 0; trial < 20; ++trial) {
    const auto game = testing::random_horse_game(rng, M, horse_model.n());
    const auto j = to_json(game);
    CHECK(to_json(game_from_json(json::parse(j.dump()), horse_model)) == j);
  }
  const auto flat = json::parse(R"({"type": "horse_race", "M": 3, "odds": [2.0, 3.0, 6.0]})");
  const auto from_flat = game_from_json(flat, horse_model);
  CHECK(to_json(from_flat) == to_json(GameSpec::horse_race(3, horse_model.n(), {2.0, 3.0, 6.0})));
  CHECK_THROWS_AS(game_from_json(json::parse(R"({"type": "horse_race", "M": 4, "odds": [4, 4, 4, 4]})"),
                                 horse_model),
                  SchemaError);
  CHECK_THROWS_AS(game_from_json(json::parse(R"({"type": "roulette"})"), model), SchemaError);
}

TEST_CASE("strategies round trip") {
  Rng rng(93);
  testing::ModelShape shape;
  shape.max_y = 2;
  shape.max_sequences = 2000;
  for (int trial = 0; trial < 40; ++trial) {
    const auto model = testing::random_model(rng, shape);
    const auto game = testing::random_binary_game(rng);
    const auto strategy = testing::random_binary_strategy(rng, game, model);
    const auto j = to_json(strategy, model);
    const auto loaded = strategy_from_json(json::parse(j.dump()), model, game);
    CHECK(to_json(loaded, model) == j);
    const auto growth = TrajectoryFunctional::of(Term::growth_rate);
    CHECK(exact_expectation(model, game, loaded, growth) == exact_expectation(model, game, strategy, growth));
  }
  shape.min_y = 3;
  shape.max_y = 3;
  shape.max_n = 4;
  for (int trial = 0; trial < 20; ++trial) {
    const auto model = testing::random_model(rng, shape);
    const auto game = testing::random_horse_game(rng, 3, model.n());
    const auto strategy = testing::random_horse_strategy(rng, model);
    const auto j = to_json(strategy, model);
    CHECK(to_json(strategy_from_json(j, model, game), model) == j);
  }
  const auto s = ks::build(ks::NoisyInformant{0.5, 0.8, 2});
  const auto half = fractional_kelly(kelly_strategy(s.model, s.game), 0.5);
  const auto j = to_json(half, s.model);
  CHECK(j["kind"] == "fractional_kelly");
  CHECK(j["lambda"] == 0.5);
  const auto loaded = strategy_from_json(j, s.model, s.game);
  CHECK(loaded.kind() == StrategyKind::fractional_kelly);
  CHECK(loaded.lambda() == 0.5);
}

TEST_CASE("reports round trip") {
  const auto s = ks::build(ks::MarkovCoin{0.3, 6});
  const auto kelly = kelly_strategy(s.model, s.game);
  const auto exact = verify_theorem(Theorem::three, s.model, s.game, fractional_kelly(kelly, 0.5));
  const auto j = to_json(exact);
  CHECK_FALSE(j.contains("wall_seconds"));
  CHECK(j["seed"].is_null());
  CHECK(to_json(report_from_json(json::parse(j.dump()))) == j);
  CHECK(to_json(exact, true).contains("wall_seconds"));

  const auto mc = verify_monte_carlo(Theorem::three, s.model, s.game, kelly, {3, 500, 1});
  const auto jm = to_json(mc);
  const auto loaded = report_from_json(jm);
  REQUIRE(loaded.monte_carlo.has_value());
  CHECK(*loaded.monte_carlo == *mc.monte_carlo);
  CHECK(loaded.seed == mc.seed);
  CHECK(to_json(loaded) == jm);

  const Estimate e{0.25, 1e-3, 1000, 42, 0.5, true};
  CHECK(estimate_from_json(to_json(e)) == e);
}

TEST_CASE("files") {
  const auto model = ks::build(ks::MarkovCoin{0.45, 4}).model;
  const std::string path = "kellylab_serialize_test_model.json";
  {
    std::ofstream out(path);
    out << to_json(model).dump(2);
  }
  CHECK(to_json(model_from_json(read_json_file(path))) == to_json(model));
  std::remove(path.c_str());
}
