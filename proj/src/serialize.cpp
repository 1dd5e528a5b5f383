#include "kellylab/serialize.hpp"

#include <fstream>
#include <limits>
#include <sstream>

#include "kellylab/error.hpp"

namespace kellylab {

using nlohmann::json;

namespace {

// Access helpers that raise SchemaError with the offending field name.
const json& field(const json& j, const char* name) {
  if (!j.is_object()) throw SchemaError(std::string("expected an object holding '") + name + "'");
  const auto it = j.find(name);
  if (it == j.end()) throw SchemaError(std::string("missing field '") + name + "'");
  return *it;
}

double number(const json& j, const char* name) {
  const auto& v = field(j, name);
  if (!v.is_number()) throw SchemaError(std::string("field '") + name + "' must be a number");
  return v.get<double>();
}

std::uint64_t unsigned_number(const json& j, const char* name) {
  const auto& v = field(j, name);
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
    throw SchemaError(std::string("field '") + name + "' must be a nonnegative integer");
  }
  return v.get<std::uint64_t>();
}

std::string text(const json& j, const char* name) {
  const auto& v = field(j, name);
  if (!v.is_string()) throw SchemaError(std::string("field '") + name + "' must be a string");
  return v.get<std::string>();
}

void check_schema(const json& j) {
  if (j.contains("schema") && j["schema"] != kSchemaVersion) {
    throw SchemaError("unsupported schema version " + j["schema"].dump());
  }
}

json order_to_json(int order) { return order == kFullHistory ? json("full") : json(order); }

int order_from_json(const json& j, const char* name) {
  const auto& v = field(j, name);
  if (v.is_string() && v.get<std::string>() == "full") return kFullHistory;
  if (v.is_number_integer() && v.get<std::int64_t>() >= 0) return v.get<int>();
  throw SchemaError(std::string("field '") + name + "' must be a nonnegative integer or \"full\"");
}

std::vector<double> row_from_json(const json& v, const std::string& key) {
  if (v.is_number()) return {v.get<double>()};
  if (!v.is_array()) throw SchemaError("row '" + key + "' must be an array of numbers");
  std::vector<double> row;
  for (const auto& e : v) {
    if (!e.is_number()) throw SchemaError("row '" + key + "' must be an array of numbers");
    row.push_back(e.get<double>());
  }
  return row;
}

json table_to_json(const HistoryTable& table, const std::vector<std::string>& own_labels,
                   const std::vector<std::string>& other_labels, bool with_other = true) {
  json rows = json::object();
  table.for_each_row([&](std::uint64_t key, std::span<const double> row) {
    rows[table.key_string(key, own_labels, other_labels)] = std::vector<double>(row.begin(), row.end());
  });
  json out;
  if (with_other) {
    out["own_order"] = order_to_json(table.memory().own);
    out["other_order"] = order_to_json(table.memory().other);
  } else {
    out["order"] = order_to_json(table.memory().own);
  }
  out["rows"] = std::move(rows);
  return out;
}

// Reads rows into a fresh table; `set` stores one validated row.
template <class Set>
void rows_from_json(const json& j, const HistoryTable& table, const std::vector<std::string>& own_labels,
                    const std::vector<std::string>& other_labels, Set&& set) {
  const auto& rows = field(j, "rows");
  if (!rows.is_object()) throw SchemaError("'rows' must be an object keyed by history");
  for (const auto& [key, value] : rows.items()) {
    const auto row = row_from_json(value, key);
    if (row.size() != table.width()) {
      throw SchemaError("row '" + key + "' has " + std::to_string(row.size()) + " entries, expected " +
                        std::to_string(table.width()));
    }
    set(table.parse_key_string(key, own_labels, other_labels), row);
  }
}

const json& step_array(const json& j, const char* name, std::size_t n) {
  const auto& arr = field(j, name);
  if (!arr.is_array() || arr.size() != n) {
    throw SchemaError(std::string("'") + name + "' must be an array with one entry per game (" +
                      std::to_string(n) + ")");
  }
  return arr;
}

Alphabet alphabet_from_json(const json& j, const char* name) {
  const auto& v = field(j, name);
  if (!v.is_array()) throw SchemaError(std::string("'") + name + "' must be an array of labels");
  std::vector<std::string> labels;
  for (const auto& e : v) {
    if (!e.is_string()) throw SchemaError(std::string("'") + name + "' must be an array of labels");
    labels.push_back(e.get<std::string>());
  }
  try {
    return Alphabet(std::move(labels));
  } catch (const Error& e) {
    throw SchemaError(std::string("'") + name + "': " + e.what());
  }
}

std::string kind_name(StrategyKind kind) {
  switch (kind) {
    case StrategyKind::general:
      return "general";
    case StrategyKind::kelly:
      return "kelly";
    case StrategyKind::fractional_kelly:
      return "fractional_kelly";
  }
  return "general";
}

StrategyKind kind_from_name(const std::string& name) {
  if (name == "general") return StrategyKind::general;
  if (name == "kelly") return StrategyKind::kelly;
  if (name == "fractional_kelly") return StrategyKind::fractional_kelly;
  throw SchemaError("unknown strategy kind '" + name + "'");
}

}  // namespace

json parse_json_text(const std::string& content, const std::string& source) {
  try {
    return json::parse(content);
  } catch (const json::parse_error& e) {
    std::size_t line = 1;
    std::size_t column = 1;
    const std::size_t end = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, content.size());
    for (std::size_t i = 0; i < end; ++i) {
      if (content[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    throw SchemaError(source + ":" + std::to_string(line) + ":" + std::to_string(column) +
                      ": malformed JSON (" + e.what() + ")");
  }
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_json_text(buffer.str(), path);
}

// ---------------------------------------------------------------------------
// Models

json to_json(const ProcessModel& model) {
  json out;
  out["schema"] = kSchemaVersion;
  out["type"] = "process_model";
  out["n"] = model.n();
  out["y_alphabet"] = model.y_alphabet().labels();
  out["x_alphabet"] = model.x_alphabet().labels();
  json ys = json::array();
  json xs = json::array();
  for (std::size_t i = 0; i < model.n(); ++i) {
    ys.push_back(table_to_json(model.y_kernel(i).table(), model.y_alphabet().labels(),
                               model.x_alphabet().labels()));
    xs.push_back(table_to_json(model.x_kernel(i).table(), model.x_alphabet().labels(),
                               model.y_alphabet().labels()));
  }
  out["y_kernels"] = std::move(ys);
  out["x_kernels"] = std::move(xs);
  return out;
}

ProcessModel model_from_json(const json& j) {
  check_schema(j);
  const std::size_t n = unsigned_number(j, "n");
  if (n == 0) throw SchemaError("'n' must be at least 1");
  const auto y = alphabet_from_json(j, "y_alphabet");
  const auto x = j.contains("x_alphabet") ? alphabet_from_json(j, "x_alphabet") : Alphabet::trivial();
  const ModelDims dims{y.size(), x.size()};
  std::vector<ConditionalKernel> y_kernels;
  std::vector<ConditionalKernel> x_kernels;
  const auto& ys = step_array(j, "y_kernels", n);
  for (std::size_t i = 0; i < n; ++i) {
    const Memory memory{order_from_json(ys[i], "own_order"), order_from_json(ys[i], "other_order")};
    ConditionalKernel kernel(outcome_shape(dims, i), memory);
    rows_from_json(ys[i], kernel.table(), y.labels(), x.labels(),
                   [&](std::uint64_t key, const std::vector<double>& row) { kernel.set_row(key, row); });
    y_kernels.push_back(std::move(kernel));
  }
  if (j.contains("x_kernels")) {
    const auto& xs = step_array(j, "x_kernels", n);
    for (std::size_t i = 0; i < n; ++i) {
      const Memory memory{order_from_json(xs[i], "own_order"), order_from_json(xs[i], "other_order")};
      ConditionalKernel kernel(side_shape(dims, i), memory);
      rows_from_json(xs[i], kernel.table(), x.labels(), y.labels(),
                     [&](std::uint64_t key, const std::vector<double>& row) { kernel.set_row(key, row); });
      x_kernels.push_back(std::move(kernel));
    }
  } else {
    if (x.size() != 1) throw SchemaError("'x_kernels' is required when x_alphabet has several symbols");
    for (std::size_t i = 0; i < n; ++i) {
      x_kernels.push_back(ConditionalKernel::filled(
          side_shape(dims, i), Memory::markov(0, 0),
          [](std::span<const int>, std::span<const int>, std::span<double> row) { row[0] = 1.0; }));
    }
  }
  return ProcessModel(n, y, x, std::move(y_kernels), std::move(x_kernels));
}

// ---------------------------------------------------------------------------
// Games

json to_json(const GameSpec& game) {
  json out;
  if (game.is_binary()) {
    out["type"] = "binary";
    out["R"] = game.binary_payoff().R;
    out["Rbar"] = game.binary_payoff().Rbar;
    return out;
  }
  const auto& h = game.horse();
  out["type"] = "horse_race";
  out["M"] = h.M;
  const auto labels = Alphabet::indexed(h.M).labels();
  const std::vector<std::string> none{"*"};
  json odds = json::array();
  for (const auto& table : h.odds) odds.push_back(table_to_json(table, labels, none, false));
  out["odds"] = std::move(odds);
  return out;
}

GameSpec game_from_json(const json& j, const ProcessModel& model) {
  check_schema(j);
  const auto type = text(j, "type");
  if (type == "binary") return GameSpec::binary(number(j, "R"), number(j, "Rbar"));
  if (type != "horse_race") throw SchemaError("unknown game type '" + type + "'");
  const std::size_t M = unsigned_number(j, "M");
  if (M != model.y_alphabet().size()) throw SchemaError("'M' must equal the outcome alphabet size");
  const auto& odds = field(j, "odds");
  if (odds.is_array() && !odds.empty() && odds[0].is_number()) {
    std::vector<double> values;
    for (const auto& v : odds) values.push_back(v.get<double>());
    return GameSpec::horse_race(M, model.n(), values);
  }
  const auto& steps = step_array(j, "odds", model.n());
  const auto labels = Alphabet::indexed(M).labels();
  const std::vector<std::string> none{"*"};
  std::vector<HistoryTable> tables;
  for (std::size_t i = 0; i < model.n(); ++i) {
    HistoryTable table(odds_shape(M, i), Memory::markov(order_from_json(steps[i], "order"), 0));
    rows_from_json(steps[i], table, labels, none,
                   [&](std::uint64_t key, const std::vector<double>& row) { table.set_row(key, row); });
    tables.push_back(std::move(table));
  }
  return GameSpec::horse_race(M, std::move(tables));
}

// ---------------------------------------------------------------------------
// Strategies

json to_json(const Strategy& strategy, const ProcessModel& model) {
  json out;
  out["type"] = strategy.is_binary() ? "binary" : "horse_race";
  out["kind"] = kind_name(strategy.kind());
  out["lambda"] = strategy.lambda();
  json tables = json::array();
  for (const auto& table : strategy.tables()) {
    tables.push_back(table_to_json(table, model.y_alphabet().labels(), model.x_alphabet().labels()));
  }
  out["tables"] = std::move(tables);
  return out;
}

Strategy strategy_from_json(const json& j, const ProcessModel& model, const GameSpec& game) {
  check_schema(j);
  const auto type = text(j, "type");
  const bool binary = type == "binary";
  if (!binary && type != "horse_race") throw SchemaError("unknown strategy type '" + type + "'");
  const auto kind = j.contains("kind") ? kind_from_name(text(j, "kind")) : StrategyKind::general;
  const double lambda = j.contains("lambda") ? number(j, "lambda") : 1.0;
  const auto& steps = step_array(j, "tables", model.n());
  std::vector<HistoryTable> tables;
  for (std::size_t i = 0; i < model.n(); ++i) {
    auto shape = outcome_shape(model.dims(), i);
    if (binary) shape.width = 1;
    HistoryTable table(shape, Memory{order_from_json(steps[i], "own_order"),
                                     order_from_json(steps[i], "other_order")});
    rows_from_json(steps[i], table, model.y_alphabet().labels(), model.x_alphabet().labels(),
                   [&](std::uint64_t key, const std::vector<double>& row) { table.set_row(key, row); });
    tables.push_back(std::move(table));
  }
  if (binary) return Strategy::binary(game, model.dims(), std::move(tables), kind, lambda);
  return Strategy::horse(model.dims(), std::move(tables), kind);
}

// ---------------------------------------------------------------------------
// Reports

json to_json(const Estimate& e) {
  return json{{"mean", e.mean},           {"stderr", e.std_error},   {"count", e.count},
              {"seed", e.seed},           {"max_share", e.max_share}, {"heavy_tail", e.heavy_tail}};
}

Estimate estimate_from_json(const json& j) {
  Estimate e;
  e.mean = number(j, "mean");
  e.std_error = number(j, "stderr");
  e.count = unsigned_number(j, "count");
  e.seed = unsigned_number(j, "seed");
  e.max_share = number(j, "max_share");
  const auto& heavy = field(j, "heavy_tail");
  if (!heavy.is_boolean()) throw SchemaError("'heavy_tail' must be a boolean");
  e.heavy_tail = heavy.get<bool>();
  return e;
}

json to_json(const EqualityReport& r, bool include_timing) {
  json out;
  out["schema"] = kSchemaVersion;
  out["theorem"] = r.theorem;
  out["expectation"] = r.expectation;
  out["deviation"] = r.deviation;
  out["tolerance"] = r.tolerance;
  out["passed"] = r.passed;
  out["terms"] = r.terms;
  out["bound"] = r.bound;
  out["gap"] = r.gap;
  out["kelly_gap"] = r.kelly_gap;
  out["saturated"] = r.saturated;
  out["sequences"] = r.sequences;
  out["seed"] = r.seed ? json(*r.seed) : json(nullptr);
  if (r.monte_carlo) out["monte_carlo"] = to_json(*r.monte_carlo);
  if (include_timing) out["wall_seconds"] = r.wall_seconds;
  return out;
}

EqualityReport report_from_json(const json& j) {
  check_schema(j);
  EqualityReport r;
  r.theorem = text(j, "theorem");
  r.expectation = number(j, "expectation");
  r.deviation = number(j, "deviation");
  r.tolerance = number(j, "tolerance");
  const auto& passed = field(j, "passed");
  if (!passed.is_boolean()) throw SchemaError("'passed' must be a boolean");
  r.passed = passed.get<bool>();
  const auto& terms = field(j, "terms");
  if (!terms.is_object()) throw SchemaError("'terms' must be an object");
  for (const auto& [name, value] : terms.items()) {
    if (value.is_null()) {
      r.terms[name] = std::numeric_limits<double>::quiet_NaN();
      continue;
    }
    if (!value.is_number()) throw SchemaError("term '" + name + "' must be a number");
    r.terms[name] = value.get<double>();
  }
  r.bound = number(j, "bound");
  r.gap = number(j, "gap");
  r.kelly_gap = number(j, "kelly_gap");
  r.saturated = field(j, "saturated").get<bool>();
  r.sequences = unsigned_number(j, "sequences");
  const auto& seed = field(j, "seed");
  if (!seed.is_null()) r.seed = unsigned_number(j, "seed");
  if (j.contains("monte_carlo")) r.monte_carlo = estimate_from_json(j["monte_carlo"]);
  if (j.contains("wall_seconds")) r.wall_seconds = number(j, "wall_seconds");
  return r;
}

}  // namespace kellylab
