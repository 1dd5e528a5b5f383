#include "kellylab/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "kellylab/betting.hpp"
#include "kellylab/equalities.hpp"
#include "kellylab/error.hpp"
#include "kellylab/information.hpp"
#include "kellylab/montecarlo.hpp"
#include "kellylab/scenarios.hpp"
#include "kellylab/serialize.hpp"

namespace kellylab::cli {
namespace {

using nlohmann::json;

struct Options {
  std::string scenario;
  std::string model_path;
  std::string strategy = "kelly";
  std::vector<double> f;
  std::string theorem = "auto";
  std::optional<double> p, q, eps, sigma, delta, R, Rbar, stay;
  std::optional<std::size_t> n, K, M;
  std::vector<double> odds;
  bool mc = false;
  bool mc_always = false;
  std::uint64_t seed = 0;
  std::uint64_t trajectories = 10'000;
  unsigned workers = 1;
  std::optional<std::uint64_t> cap;
  std::string out;
  std::string trajectory_csv;
  std::string histogram_csv;
  std::size_t bins = 40;
  std::string dump_model;
  bool timing = false;
};

void add_source_options(CLI::App* app, Options& o) {
  app->add_option("--scenario", o.scenario,
                  "iid-coin | noisy-informant | markov-coin | theta-coin | horse-demo");
  app->add_option("--model", o.model_path, "JSON model file, optionally with a \"game\" section");
  app->add_option("--p", o.p, "win probability, or mean flip probability for theta-coin");
  app->add_option("--q", o.q, "probability that the tip is right");
  app->add_option("--eps", o.eps, "flip probability of the Markov coin");
  app->add_option("--sigma", o.sigma, "standard deviation of theta");
  app->add_option("--K", o.K, "theta grid size");
  app->add_option("--delta", o.delta, "theta grid truncation");
  app->add_option("--n", o.n, "number of games");
  app->add_option("--M", o.M, "number of horses");
  app->add_option("--odds", o.odds, "odds per horse")->delimiter(',');
  app->add_option("--stay", o.stay, "probability that the previous winner wins again (horse-demo)");
  app->add_option("--R", o.R, "payoff of a win");
  app->add_option("--Rbar", o.Rbar, "loss of a losing bet");
  app->add_option("--cap", o.cap, "enumeration cap (default: KELLYLAB_ENUM_CAP or 10000000)");
  app->add_option("--out", o.out, "write the JSON report here instead of stdout");
  app->add_option("--dump-model", o.dump_model, "write the resolved model and game as JSON");
}

void add_strategy_options(CLI::App* app, Options& o) {
  app->add_option("--strategy", o.strategy, "kelly | fractional:<lambda> | <strategy JSON file>");
  app->add_option("--f", o.f, "constant fraction, or one fraction per side-information symbol")
      ->delimiter(',');
}

void add_sampler_options(CLI::App* app, Options& o) {
  app->add_option("--seed", o.seed, "Monte Carlo seed");
  app->add_option("--trajectories", o.trajectories, "number of Monte Carlo trajectories");
  app->add_option("--workers", o.workers, "sampling threads");
}

// ---------------------------------------------------------------------------
// Sources

struct Source {
  json description;
  ProcessModel model;
  GameSpec game;
  std::map<std::string, double> reference;
  json extra = json::object();
};

template <class T>
T value_or(const std::optional<T>& v, T fallback) {
  return v ? *v : fallback;
}

Source resolve_source(const Options& o) {
  if (o.scenario.empty() == o.model_path.empty()) {
    throw InvalidParameter("give exactly one of --scenario or --model");
  }
  Source src;
  if (!o.model_path.empty()) {
    const json config = read_json_file(o.model_path);
    const json& model_json = config.contains("model") ? config["model"] : config;
    src.model = model_from_json(model_json);
    if (config.contains("game")) {
      src.game = game_from_json(config["game"], src.model);
    } else if (src.model.y_alphabet().size() == 2 && o.odds.empty()) {
      src.game = GameSpec::binary(value_or(o.R, 1.0), value_or(o.Rbar, 1.0));
    } else if (!o.odds.empty()) {
      src.game = GameSpec::horse_race(src.model.y_alphabet().size(), src.model.n(), o.odds);
    } else {
      src.game = GameSpec::fair_uniform(src.model.y_alphabet().size(), src.model.n());
    }
    src.description = {{"kind", "model"}, {"path", o.model_path}};
    return src;
  }

  scenarios::ScenarioSpec spec;
  json params;
  const std::string& kind = o.scenario;
  if (kind == "iid-coin") {
    scenarios::IidCoin s;
    s.p = value_or(o.p, s.p);
    s.n = value_or(o.n, s.n);
    s.R = value_or(o.R, s.R);
    s.Rbar = value_or(o.Rbar, s.Rbar);
    params = {{"p", s.p}, {"n", s.n}, {"R", s.R}, {"Rbar", s.Rbar}};
    spec = s;
  } else if (kind == "noisy-informant") {
    scenarios::NoisyInformant s;
    s.p = value_or(o.p, s.p);
    s.q = value_or(o.q, s.q);
    s.n = value_or(o.n, s.n);
    s.R = value_or(o.R, s.R);
    s.Rbar = value_or(o.Rbar, s.Rbar);
    params = {{"p", s.p}, {"q", s.q}, {"n", s.n}, {"R", s.R}, {"Rbar", s.Rbar}};
    spec = s;
  } else if (kind == "markov-coin") {
    scenarios::MarkovCoin s;
    s.eps = value_or(o.eps, s.eps);
    s.n = value_or(o.n, s.n);
    params = {{"eps", s.eps}, {"n", s.n}};
    spec = s;
  } else if (kind == "theta-coin") {
    scenarios::ThetaCoin s;
    s.p = value_or(o.p, s.p);
    s.sigma = value_or(o.sigma, s.sigma);
    s.K = value_or(o.K, s.K);
    s.delta = value_or(o.delta, s.delta);
    s.n = value_or(o.n, s.n);
    params = {{"p", s.p}, {"sigma", s.sigma}, {"K", s.K}, {"delta", s.delta}, {"n", s.n}};
    const auto grid = scenarios::theta_grid(s.p, s.sigma, s.K, s.delta);
    src.extra["theta_grid"] = {{"theta", grid.theta},
                               {"weights", grid.weights.probs()},
                               {"p_eff", grid.p_eff},
                               {"sigma2_eff", grid.sigma2_eff},
                               {"span", "K equispaced points on [max(delta, p - 4 sigma), "
                                        "min(1 - delta, p + 4 sigma)], Gaussian weights renormalized"}};
    spec = s;
  } else if (kind == "horse-demo") {
    scenarios::HorseDemo s;
    s.M = value_or(o.M, s.M);
    s.n = value_or(o.n, s.n);
    s.odds = o.odds;
    if (o.stay) {
      const double stay = *o.stay;
      const double move = (1.0 - stay) / static_cast<double>(s.M - 1);
      s.transition.assign(s.M * s.M, move);
      for (std::size_t a = 0; a < s.M; ++a) s.transition[a * s.M + a] = stay;
    }
    params = {{"M", s.M}, {"n", s.n}, {"odds", s.odds}};
    if (o.stay) params["stay"] = *o.stay;
    spec = s;
  } else {
    throw InvalidParameter("unknown scenario '" + kind + "'");
  }
  auto scenario = scenarios::build(spec);
  src.model = std::move(scenario.model);
  src.game = std::move(scenario.game);
  src.reference = std::move(scenario.reference);
  src.description = {{"kind", kind}, {"parameters", params}};
  return src;
}

std::uint64_t resolve_cap(const Options& o) {
  if (o.cap) return *o.cap;
  if (const char* env = std::getenv("KELLYLAB_ENUM_CAP")) {
    std::uint64_t value = 0;
    const std::string text(env);
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
      throw InvalidParameter("KELLYLAB_ENUM_CAP must be a nonnegative integer, got '" + text + "'");
    }
    return value;
  }
  return kDefaultEnumerationCap;
}

Strategy resolve_strategy(const Options& o, const Source& src) {
  const auto& model = src.model;
  const auto& game = src.game;
  if (!o.f.empty()) {
    if (!game.is_binary()) throw InvalidParameter("--f applies to binary games only");
    if (o.f.size() == 1) return Strategy::constant_binary(game, model.dims(), model.n(), o.f[0]);
    if (o.f.size() != model.x_alphabet().size()) {
      throw InvalidParameter("--f needs one value or one value per side-information symbol");
    }
    const auto f = o.f;
    return Strategy::stationary_binary(
        game, model.dims(), model.n(), Memory::markov(0, 1),
        [&f](std::span<const int>, std::span<const int> x, std::span<double> row) {
          row[0] = f[static_cast<std::size_t>(x.back())];
        });
  }
  if (o.strategy == "kelly") return kelly_strategy(model, game);
  if (o.strategy.rfind("fractional:", 0) == 0) {
    const std::string text = o.strategy.substr(11);
    double lambda = 0.0;
    try {
      std::size_t used = 0;
      lambda = std::stod(text, &used);
      if (used != text.size()) throw std::invalid_argument(text);
    } catch (const std::exception&) {
      throw InvalidParameter("cannot parse lambda in '" + o.strategy + "'");
    }
    return fractional_kelly(kelly_strategy(model, game), lambda);
  }
  return strategy_from_json(read_json_file(o.strategy), model, game);
}

// ---------------------------------------------------------------------------
// Output

void emit(const json& doc, const Options& o, std::ostream& out) {
  const std::string text = doc.dump(2) + "\n";
  if (o.out.empty()) {
    out << text;
    return;
  }
  std::ofstream file(o.out);
  if (!file) throw InvalidParameter("cannot write '" + o.out + "'");
  file << text;
}

json document(const char* command, const Source& src) {
  json doc;
  doc["schema"] = kSchemaVersion;
  doc["command"] = command;
  doc["source"] = src.description;
  if (!src.reference.empty()) doc["reference"] = src.reference;
  for (const auto& [key, value] : src.extra.items()) doc[key] = value;
  return doc;
}

void dump_model(const Options& o, const Source& src) {
  if (o.dump_model.empty()) return;
  std::ofstream file(o.dump_model);
  if (!file) throw InvalidParameter("cannot write '" + o.dump_model + "'");
  file << json{{"model", to_json(src.model)}, {"game", to_json(src.game)}}.dump(2) << "\n";
}

std::vector<std::string> selected_theorems(const Options& o, const Source& src) {
  const std::string applicable = std::to_string(static_cast<int>(applicable_theorem(src.model, src.game)));
  if (o.theorem == "auto") return {applicable};
  if (o.theorem == "all") return {applicable, "unified"};
  return {o.theorem};
}

Theorem parse_theorem(const std::string& name) {
  if (name.size() == 1 && name[0] >= '1' && name[0] <= '5') return static_cast<Theorem>(name[0] - '0');
  throw InvalidParameter("--theorem must be 1..5, unified, auto or all; got '" + name + "'");
}

// ---------------------------------------------------------------------------
// Commands

int cmd_verify(const Options& o, std::ostream& out, std::ostream& err) {
  const auto src = resolve_source(o);
  dump_model(o, src);
  const auto strategy = resolve_strategy(o, src);
  const EnumerationOptions enumeration{resolve_cap(o)};
  const bool too_large = src.model.sequence_count() > enumeration.cap;
  const bool use_mc = o.mc_always || (o.mc && too_large);
  if (too_large && !use_mc) {
    throw EnumerationTooLarge("the model has " + std::to_string(src.model.sequence_count()) +
                              " sequences, above the cap of " + std::to_string(enumeration.cap) +
                              "; rerun with --mc for a Monte Carlo check");
  }
  const SamplerConfig sampler{o.seed, o.trajectories, o.workers};
  json reports = json::array();
  bool passed = true;
  for (const auto& name : selected_theorems(o, src)) {
    EqualityReport report;
    if (name == "unified") {
      const auto kelly = kelly_strategy(src.model, src.game);
      report = use_mc ? verify_unified_monte_carlo(src.model, src.game, strategy, kelly, sampler)
                      : verify_unified(src.model, src.game, strategy, kelly, std::nullopt, enumeration);
    } else {
      const Theorem theorem = parse_theorem(name);
      report = use_mc ? verify_monte_carlo(theorem, src.model, src.game, strategy, sampler)
                      : verify_theorem(theorem, src.model, src.game, strategy, enumeration);
    }
    if (report.monte_carlo && report.monte_carlo->heavy_tail) {
      err << "warning: " << report.theorem << " estimate is dominated by a single trajectory (share "
          << report.monte_carlo->max_share << ")\n";
    }
    passed = passed && report.passed;
    reports.push_back(to_json(report, o.timing));
  }
  auto doc = document("verify", src);
  doc["method"] = use_mc ? "monte_carlo" : "exact";
  doc["reports"] = std::move(reports);
  doc["passed"] = passed;
  emit(doc, o, out);
  if (!passed) err << "equality violated beyond tolerance\n";
  return passed ? kExitOk : kExitEqualityViolated;
}

int cmd_optimize(const Options& o, std::ostream& out, std::ostream&) {
  const auto src = resolve_source(o);
  dump_model(o, src);
  const EnumerationOptions enumeration{resolve_cap(o)};
  const auto kelly = kelly_strategy(src.model, src.game);
  const auto bounds = jensen_bounds(src.model, src.game, enumeration);
  json b;
  b["entropy_per_game"] = bounds.entropy_per_game;
  b["directed_information_per_game"] = bounds.directed_information_per_game;
  b["mean_log_odds_per_game"] = bounds.mean_log_odds_per_game;
  if (bounds.kl_per_game) b["kl_per_game"] = *bounds.kl_per_game;
  b["bound"] = bounds.rhs;
  if (bounds.even_money) b["even_money_bound"] = *bounds.even_money;
  if (bounds.fair_uniform) b["fair_uniform_bound"] = *bounds.fair_uniform;
  b["kelly_growth"] = bounds.kelly_growth;
  b["kelly_gap"] = bounds.kelly_gap;
  b["kelly_saturates"] = bounds.kelly_saturates;
  auto doc = document("optimize", src);
  doc["strategy"] = to_json(kelly, src.model);
  doc["bounds"] = std::move(b);
  emit(doc, o, out);
  return kExitOk;
}

void write_histogram(const std::string& path, const std::vector<double>& values, std::size_t bins) {
  std::ofstream file(path);
  if (!file) throw InvalidParameter("cannot write '" + path + "'");
  if (bins < 1) throw InvalidParameter("--bins must be at least 1");
  const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
  const double lo = *lo_it;
  const double hi = *hi_it;
  if (hi == lo) bins = 1;
  const double width = hi == lo ? 0.0 : (hi - lo) / static_cast<double>(bins);
  std::vector<std::uint64_t> counts(bins, 0);
  for (double v : values) {
    std::size_t b = width == 0.0 ? 0 : static_cast<std::size_t>((v - lo) / width);
    counts[std::min(b, bins - 1)] += 1;
  }
  file << "bin_low,bin_high,count\n";
  char line[128];
  for (std::size_t b = 0; b < bins; ++b) {
    const double a = lo + width * static_cast<double>(b);
    const double c = b + 1 == bins ? hi : lo + width * static_cast<double>(b + 1);
    std::snprintf(line, sizeof line, "%.17g,%.17g,%llu\n", a, c,
                  static_cast<unsigned long long>(counts[b]));
    file << line;
  }
}

int cmd_simulate(const Options& o, std::ostream& out, std::ostream& err) {
  const auto src = resolve_source(o);
  dump_model(o, src);
  const auto strategy = resolve_strategy(o, src);
  const SamplerConfig sampler{o.seed, o.trajectories, o.workers};
  validate(sampler);
  const auto terms = sample_terms(src.model, src.game, &strategy, sampler);
  const double n = static_cast<double>(src.model.n());
  const auto exponent =
      TrajectoryFunctional::theorem_exponent(applicable_theorem(src.model, src.game)).exponential();
  std::vector<double> growth(terms.size());
  std::vector<double> equality(terms.size());
  for (std::size_t t = 0; t < terms.size(); ++t) {
    growth[t] = terms[t].log_wealth / n;
    equality[t] = exponent.evaluate(terms[t]);
  }
  const auto growth_est = summarize(growth, o.seed);
  const auto equality_est = summarize(equality, o.seed);
  if (equality_est.heavy_tail) {
    err << "warning: equality estimate is dominated by a single trajectory (share "
        << equality_est.max_share << ")\n";
  }
  auto doc = document("simulate", src);
  doc["trajectories"] = o.trajectories;
  doc["seed"] = o.seed;
  doc["estimates"] = {
      {"growth_rate", to_json(growth_est)},
      {"growth_rate_variance",
       growth_est.std_error * growth_est.std_error * static_cast<double>(growth_est.count)},
      {"equality", to_json(equality_est)},
      {"equality_theorem", theorem_name(applicable_theorem(src.model, src.game))}};
  if (!o.trajectory_csv.empty()) {
    TrajectoryStream stream(o.seed, 0);
    const auto path = sample_trajectory(src.model, src.game, strategy, stream);
    std::ofstream file(o.trajectory_csv);
    if (!file) throw InvalidParameter("cannot write '" + o.trajectory_csv + "'");
    write_trajectory_csv(file, path.wealth, src.model.x_alphabet(), src.model.y_alphabet());
  }
  if (!o.histogram_csv.empty()) write_histogram(o.histogram_csv, growth, o.bins);
  emit(doc, o, out);
  return kExitOk;
}

int cmd_info(const Options& o, std::ostream& out, std::ostream&) {
  const auto src = resolve_source(o);
  dump_model(o, src);
  const auto strategy = resolve_strategy(o, src);
  const EnumerationOptions enumeration{resolve_cap(o)};
  const ExactEnsemble ensemble(src.model, src.game, enumeration);
  const double n = static_cast<double>(src.model.n());
  json info;
  info["sequences"] = ensemble.sequences();
  info["entropy"] = ensemble.entropy();
  info["entropy_per_game"] = ensemble.entropy() / n;
  info["causally_conditional_entropy"] = causally_conditional_entropy(ensemble.joint());
  info["mutual_information"] = mutual_information(ensemble.joint());
  info["directed_information"] = ensemble.directed_information();
  if (src.game.is_binary()) info["kl"] = ensemble.mean_log_odds() - ensemble.entropy();
  info["mean_log_odds"] = ensemble.mean_log_odds();
  info["efficacy"] = efficacy(ensemble, strategy);
  info["efficacy_kelly"] = efficacy_kelly(ensemble);
  auto doc = document("info", src);
  doc["info"] = std::move(info);
  emit(doc, o, out);
  return kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Kelly betting, information measures and exact equality checks"};
  app.name("kellylab");
  app.require_subcommand(1, 1);

  auto* verify = app.add_subcommand("verify", "check an equality exactly or by Monte Carlo");
  add_source_options(verify, o);
  add_strategy_options(verify, o);
  add_sampler_options(verify, o);
  verify->add_option("--theorem", o.theorem, "1..5, unified, auto (default) or all");
  verify->add_flag("--mc", o.mc, "fall back to Monte Carlo when enumeration exceeds the cap");
  verify->add_flag("--mc-always", o.mc_always, "use Monte Carlo even when enumeration fits");
  verify->add_flag("--timing", o.timing, "include wall time in reports");

  auto* optimize = app.add_subcommand("optimize", "Kelly strategy and growth bounds");
  add_source_options(optimize, o);

  auto* simulate = app.add_subcommand("simulate", "Monte Carlo trajectories and growth statistics");
  add_source_options(simulate, o);
  add_strategy_options(simulate, o);
  add_sampler_options(simulate, o);
  simulate->add_option("--trajectory-csv", o.trajectory_csv, "CSV of the first trajectory");
  simulate->add_option("--histogram-csv", o.histogram_csv, "CSV histogram of growth rates");
  simulate->add_option("--bins", o.bins, "histogram bins");

  auto* info = app.add_subcommand("info", "entropy, KL, MI, directed information and efficacy");
  add_source_options(info, o);
  add_strategy_options(info, o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfigError;
  }

  try {
    if (verify->parsed()) return cmd_verify(o, out, err);
    if (optimize->parsed()) return cmd_optimize(o, out, err);
    if (simulate->parsed()) return cmd_simulate(o, out, err);
    return cmd_info(o, out, err);
  } catch (const EnumerationTooLarge& e) {
    err << "error: " << e.what() << "\n";
    return kExitTooLarge;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfigError;
  }
}

}  // namespace kellylab::cli
