#include "kellylab/montecarlo.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <functional>
#include <limits>
#include <map>
#include <mutex>
#include <string>
#include <thread>

#include "kellylab/equalities.hpp"
#include "kellylab/error.hpp"
#include "kellylab/numeric.hpp"

namespace kellylab {

void validate(const SamplerConfig& config) {
  if (config.trajectories < 1) throw InvalidParameter("at least one trajectory is required");
  if (config.workers < 1) throw InvalidParameter("at least one worker is required");
}

TrajectoryStream::TrajectoryStream(std::uint64_t seed, std::uint64_t trajectory) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(trajectory),
                    static_cast<std::uint32_t>(trajectory >> 32)};
  engine_.seed(seq);
}

double TrajectoryStream::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

int draw_index(std::span<const double> probs, double u) {
  double cumulative = 0.0;
  int last_positive = -1;
  for (std::size_t k = 0; k < probs.size(); ++k) {
    if (probs[k] <= 0.0) continue;
    last_positive = static_cast<int>(k);
    cumulative += probs[k];
    if (u < cumulative) return last_positive;
  }
  if (last_positive < 0) throw InvalidDistribution("cannot draw from an all-zero row");
  return last_positive;
}

void sample_sequence(const ProcessModel& model, TrajectoryStream& stream, std::span<int> xs,
                     std::span<int> ys) {
  const std::size_t n = model.n();
  if (xs.size() != n || ys.size() != n) throw InvalidParameter("sequence buffers must have length n");
  for (std::size_t i = 0; i < n; ++i) {
    const double ux = stream.uniform();
    const double uy = stream.uniform();
    xs[i] = draw_index(model.side_row(i, xs.first(i), ys.first(i)), ux);
    ys[i] = draw_index(model.outcome_row(i, ys.first(i), xs.first(i + 1)), uy);
  }
}

SampledPath sample_trajectory(const ProcessModel& model, const GameSpec& game, const Strategy& strategy,
                              TrajectoryStream& stream) {
  strategy.check_compatible(model, game);
  SampledPath path;
  path.xs.resize(model.n());
  path.ys.resize(model.n());
  sample_sequence(model, stream, path.xs, path.ys);
  path.wealth = play(game, strategy, path.xs, path.ys);
  return path;
}

namespace {

// Longest x history any kernel reads; n when some kernel keeps the full past.
std::size_t x_lookback(const ProcessModel& model) {
  std::size_t L = 0;
  for (std::size_t i = 0; i < model.n(); ++i) {
    const int a = model.x_kernel(i).table().memory().own;
    const int b = model.y_kernel(i).table().memory().other;
    if (a == kFullHistory || b == kFullHistory) return model.n();
    L = std::max({L, static_cast<std::size_t>(a), static_cast<std::size_t>(b)});
  }
  return L;
}

}  // namespace

double log_outcome_probability(const ProcessModel& model, std::span<const int> ys) {
  const std::size_t n = model.n();
  if (ys.size() != n) throw InvalidParameter("outcome sequence must have length n");
  std::vector<int> xs(n, 0);
  if (!model.has_side_information()) {
    CompensatedSum sum;
    for (std::size_t i = 0; i < n; ++i) {
      sum += std::log(model.outcome_row(i, ys.first(i), std::span<const int>(xs).first(i + 1))
                          [static_cast<std::size_t>(ys[i])]);
    }
    return sum.value();
  }
  const std::size_t L = x_lookback(model);
  std::map<std::vector<int>, double> alpha{{{}, 1.0}};
  double log_scale = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    std::map<std::vector<int>, double> next;
    for (const auto& [state, a] : alpha) {
      // Only the tail that the kernels can see is meaningful.
      std::fill(xs.begin(), xs.begin() + static_cast<std::ptrdiff_t>(i), 0);
      std::copy(state.begin(), state.end(), xs.begin() + static_cast<std::ptrdiff_t>(i - state.size()));
      const auto side = model.side_row(i, std::span<const int>(xs).first(i), ys.first(i));
      for (std::size_t x = 0; x < side.size(); ++x) {
        if (side[x] == 0.0) continue;
        xs[i] = static_cast<int>(x);
        const double out = model.outcome_row(i, ys.first(i), std::span<const int>(xs).first(i + 1))
            [static_cast<std::size_t>(ys[i])];
        if (out == 0.0) continue;
        const std::size_t keep = std::min(L, i + 1);
        std::vector<int> key(xs.begin() + static_cast<std::ptrdiff_t>(i + 1 - keep),
                             xs.begin() + static_cast<std::ptrdiff_t>(i + 1));
        next[std::move(key)] += a * side[x] * out;
      }
    }
    double total = 0.0;
    for (const auto& [state, a] : next) total += a;
    if (total == 0.0) return -std::numeric_limits<double>::infinity();
    for (auto& [state, a] : next) a /= total;
    log_scale += std::log(total);
    alpha = std::move(next);
  }
  return log_scale;
}

namespace {

struct PathTerms {
  SequenceTerms terms;
  double kelly_log_wealth = 0.0;
};

double path_log_wealth(const GameSpec& game, const Strategy& strategy, std::span<const int> xs,
                       std::span<const int> ys) {
  double sum = 0.0;
  for (std::size_t i = 0; i < ys.size(); ++i) {
    const double factor = strategy.wealth_factor(game, i, ys.first(i), xs.first(i + 1), ys[i]);
    if (!(factor > 0.0)) {
      throw RuinEncountered("sampled trajectory hit wealth factor " + std::to_string(factor) +
                            " at game " + std::to_string(i + 1));
    }
    sum += std::log(factor);
  }
  return sum;
}

// Runs body(t) for every trajectory index, splitting indices into
// contiguous blocks across workers.
template <class Body>
void for_each_trajectory(const SamplerConfig& config, Body&& body) {
  validate(config);
  const std::uint64_t count = config.trajectories;
  const std::uint64_t workers = std::min<std::uint64_t>(config.workers, count);
  if (workers <= 1) {
    for (std::uint64_t t = 0; t < count; ++t) body(t);
    return;
  }
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> threads;
  for (std::uint64_t w = 0; w < workers; ++w) {
    const std::uint64_t begin = count * w / workers;
    const std::uint64_t end = count * (w + 1) / workers;
    threads.emplace_back([&, begin, end] {
      try {
        for (std::uint64_t t = begin; t < end; ++t) body(t);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    });
  }
  for (auto& thread : threads) thread.join();
  if (failure) std::rethrow_exception(failure);
}

std::vector<PathTerms> sample_path_terms(const ProcessModel& model, const GameSpec& game,
                                         const Strategy* strategy, const Strategy* kelly,
                                         const SamplerConfig& config) {
  game.check_compatible(model);
  if (strategy) strategy->check_compatible(model, game);
  if (kelly) kelly->check_compatible(model, game);
  const std::size_t n = model.n();
  std::vector<PathTerms> out(config.trajectories);
  for_each_trajectory(config, [&](std::uint64_t t) {
    TrajectoryStream stream(config.seed, t);
    std::vector<int> xs(n);
    std::vector<int> ys(n);
    sample_sequence(model, stream, xs, ys);
    PathTerms& p = out[t];
    p.terms.n = n;
    double causal = 0.0;
    double odds = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const auto y_hist = std::span<const int>(ys).first(i);
      causal += std::log(model.outcome_row(i, y_hist, std::span<const int>(xs).first(i + 1))
                             [static_cast<std::size_t>(ys[i])]);
      odds += std::log(game.odds(i, y_hist, ys[i]));
    }
    p.terms.log_py_causal = causal;
    p.terms.log_odds = odds;
    p.terms.log_py = log_outcome_probability(model, ys);
    if (strategy) p.terms.log_wealth = path_log_wealth(game, *strategy, xs, ys);
    if (kelly) p.kelly_log_wealth = path_log_wealth(game, *kelly, xs, ys);
  });
  return out;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

template <class F>
Estimate summarize_by(const std::vector<PathTerms>& paths, std::uint64_t seed, F&& value) {
  std::vector<double> values(paths.size());
  for (std::size_t t = 0; t < paths.size(); ++t) values[t] = value(paths[t]);
  return summarize(values, seed);
}

// Shared body of the two Monte Carlo verifications.
EqualityReport monte_carlo_report(std::string name, const ProcessModel& model, const GameSpec& game,
                                  const std::vector<PathTerms>& paths, const SamplerConfig& config,
                                  const std::function<double(const PathTerms&)>& exponent) {
  EqualityReport report;
  report.theorem = std::move(name);
  const auto est = summarize_by(paths, config.seed, exponent);
  report.expectation = est.mean;
  report.deviation = std::abs(est.mean - 1.0);
  report.tolerance = est.std_error > 0.0 ? 4.0 * est.std_error : equality_tolerance(model.n());
  report.passed = report.deviation <= report.tolerance;
  const double n = static_cast<double>(model.n());
  const double growth = summarize_by(paths, config.seed, [](const PathTerms& p) { return p.terms.log_wealth; }).mean / n;
  const double kelly = summarize_by(paths, config.seed, [](const PathTerms& p) { return p.kelly_log_wealth; }).mean / n;
  const double entropy = summarize_by(paths, config.seed, [](const PathTerms& p) { return -p.terms.log_py; }).mean;
  const double info = summarize_by(paths, config.seed, [](const PathTerms& p) {
                        return p.terms.log_py_causal - p.terms.log_py;
                      }).mean;
  const double log_odds = summarize_by(paths, config.seed, [](const PathTerms& p) { return p.terms.log_odds; }).mean;
  auto& t = report.terms;
  t["mean_growth"] = growth;
  t["kelly_growth"] = kelly;
  t["entropy"] = entropy;
  t["entropy_per_game"] = entropy / n;
  t["directed_information"] = info;
  t["information_per_game"] = info / n;
  t["mean_log_odds"] = log_odds;
  if (game.is_binary()) {
    t["kl"] = log_odds - entropy;
    t["kl_per_game"] = (log_odds - entropy) / n;
  }
  report.bound = (log_odds - entropy + info) / n;
  report.gap = report.bound - growth;
  report.kelly_gap = report.bound - kelly;
  report.saturated = false;
  report.sequences = model.sequence_count();
  report.seed = config.seed;
  report.monte_carlo = est;
  return report;
}

}  // namespace

std::vector<SequenceTerms> sample_terms(const ProcessModel& model, const GameSpec& game,
                                        const Strategy* strategy, const SamplerConfig& config) {
  const auto paths = sample_path_terms(model, game, strategy, nullptr, config);
  std::vector<SequenceTerms> out;
  out.reserve(paths.size());
  for (const auto& p : paths) out.push_back(p.terms);
  return out;
}

Estimate summarize(std::span<const double> values, std::uint64_t seed) {
  if (values.empty()) throw InvalidParameter("cannot summarize an empty sample");
  Estimate e;
  e.count = values.size();
  e.seed = seed;
  const bool constant =
      std::all_of(values.begin(), values.end(), [&](double v) { return v == values.front(); });
  if (constant) {
    e.mean = values.front();
    e.std_error = 0.0;
    e.max_share = values.front() == 0.0 ? 0.0 : 1.0 / static_cast<double>(values.size());
    e.heavy_tail = e.max_share > kHeavyTailShare;
    return e;
  }
  CompensatedSum sum;
  CompensatedSum abs_sum;
  double largest = 0.0;
  for (double v : values) {
    sum += v;
    abs_sum += std::abs(v);
    largest = std::max(largest, std::abs(v));
  }
  const double count = static_cast<double>(values.size());
  e.mean = sum.value() / count;
  if (values.size() > 1) {
    CompensatedSum squares;
    for (double v : values) squares += (v - e.mean) * (v - e.mean);
    e.std_error = std::sqrt(squares.value() / (count - 1.0) / count);
  }
  e.max_share = abs_sum.value() > 0.0 ? largest / abs_sum.value() : 0.0;
  e.heavy_tail = e.max_share > kHeavyTailShare;
  if (!std::isfinite(e.mean) || !std::isfinite(e.std_error)) {
    throw Error("Monte Carlo estimate is not finite");
  }
  return e;
}

Estimate estimate(const ProcessModel& model, const GameSpec& game, const Strategy* strategy,
                  const TrajectoryFunctional& functional, const SamplerConfig& config) {
  if (functional.needs_strategy() && strategy == nullptr) {
    throw InvalidParameter("functional needs a strategy");
  }
  const auto paths = sample_path_terms(model, game, strategy, nullptr, config);
  return summarize_by(paths, config.seed, [&](const PathTerms& p) { return functional.evaluate(p.terms); });
}

EqualityReport verify_monte_carlo(Theorem theorem, const ProcessModel& model, const GameSpec& game,
                                  const Strategy& strategy, const SamplerConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  check_theorem_premises(theorem, model, game);
  const auto kelly = kelly_strategy(model, game);
  const auto paths = sample_path_terms(model, game, &strategy, &kelly, config);
  const auto exponent = TrajectoryFunctional::theorem_exponent(theorem).exponential();
  auto report = monte_carlo_report(theorem_name(theorem), model, game, paths, config,
                                   [&](const PathTerms& p) { return exponent.evaluate(p.terms); });
  report.wall_seconds = seconds_since(start);
  return report;
}

EqualityReport verify_unified_monte_carlo(const ProcessModel& model, const GameSpec& game,
                                          const Strategy& strategy, const Strategy& kelly,
                                          const SamplerConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  const auto paths = sample_path_terms(model, game, &strategy, &kelly, config);
  auto report = monte_carlo_report("unified", model, game, paths, config, [](const PathTerms& p) {
    return std::exp(p.terms.log_wealth - p.kelly_log_wealth);
  });
  report.wall_seconds = seconds_since(start);
  return report;
}

}  // namespace kellylab
