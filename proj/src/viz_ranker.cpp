#include "askdb/viz_ranker.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <unordered_set>

#include "askdb/error.hpp"
#include "askdb/spell.hpp"
#include "askdb/text.hpp"

namespace askdb::viz {

using nlohmann::json;

std::string_view to_string(ChartType t) {
  switch (t) {
    case ChartType::Bar:
      return "bar";
    case ChartType::Line:
      return "line";
    case ChartType::Pie:
      return "pie";
    case ChartType::Scatter:
      return "scatter";
  }
  return "bar";
}

std::string_view to_string(AxisKind k) {
  switch (k) {
    case AxisKind::Categorical:
      return "categorical";
    case AxisKind::Numeric:
      return "numeric";
    case AxisKind::Temporal:
      return "temporal";
  }
  return "categorical";
}

std::string_view to_string(Aggregate a) {
  switch (a) {
    case Aggregate::None:
      return "none";
    case Aggregate::Sum:
      return "sum";
    case Aggregate::Avg:
      return "avg";
    case Aggregate::Count:
      return "count";
  }
  return "none";
}

ChartType chart_type_from_string(std::string_view s) {
  for (auto t : {ChartType::Bar, ChartType::Line, ChartType::Pie, ChartType::Scatter}) {
    if (text::iequals(s, to_string(t))) return t;
  }
  throw MalformedInput("unknown chart type '" + std::string(s) + "'");
}

AxisKind axis_kind_from_string(std::string_view s) {
  for (auto k : {AxisKind::Categorical, AxisKind::Numeric, AxisKind::Temporal}) {
    if (text::iequals(s, to_string(k))) return k;
  }
  throw MalformedInput("unknown axis kind '" + std::string(s) + "'");
}

Aggregate aggregate_from_string(std::string_view s) {
  for (auto a : {Aggregate::None, Aggregate::Sum, Aggregate::Avg, Aggregate::Count}) {
    if (text::iequals(s, to_string(a))) return a;
  }
  throw MalformedInput("unknown aggregate '" + std::string(s) + "'");
}

AxisKind axis_kind(DataType t) {
  switch (t) {
    case DataType::Numeric:
      return AxisKind::Numeric;
    case DataType::Datetime:
      return AxisKind::Temporal;
    case DataType::Textual:
      return AxisKind::Categorical;
  }
  return AxisKind::Categorical;
}

// ---------------------------------------------------------------------------
// Features

DenseFeatures FeatureVector::dense() const {
  DenseFeatures d{};
  d[static_cast<std::size_t>(chart_type)] = 1;
  d[4 + static_cast<std::size_t>(x_kind)] = 1;
  d[7 + static_cast<std::size_t>(y_kind)] = 1;
  d[10] = distinct_ratio_x;
  d[11] = correlation_xy.value_or(0.0);
  d[12] = row_count > 0 ? std::min(1.0, std::log1p(static_cast<double>(group_count)) /
                                            std::log1p(static_cast<double>(row_count)))
                        : 0.0;
  d[13] = null_ratio;
  d[14] = aggregated ? 1 : 0;
  return d;
}

json FeatureVector::to_json() const {
  return json{{"chart_type", to_string(chart_type)},
              {"x_kind", to_string(x_kind)},
              {"y_kind", to_string(y_kind)},
              {"distinct_ratio_x", distinct_ratio_x},
              {"distinct_x", distinct_x},
              {"correlation_xy", correlation_xy ? json(*correlation_xy) : json(nullptr)},
              {"group_count", group_count},
              {"null_ratio", null_ratio},
              {"aggregated", aggregated},
              {"row_count", row_count}};
}

FeatureVector FeatureVector::from_json(const json& j) {
  try {
    FeatureVector f;
    f.chart_type = chart_type_from_string(j.value("chart_type", "bar"));
    f.x_kind = axis_kind_from_string(j.value("x_kind", "categorical"));
    f.y_kind = axis_kind_from_string(j.value("y_kind", "numeric"));
    f.distinct_ratio_x = j.value("distinct_ratio_x", 0.0);
    f.distinct_x = j.value("distinct_x", std::size_t{0});
    if (j.contains("correlation_xy") && !j["correlation_xy"].is_null()) {
      f.correlation_xy = j["correlation_xy"].get<double>();
    }
    f.group_count = j.value("group_count", std::size_t{0});
    f.null_ratio = j.value("null_ratio", 0.0);
    f.aggregated = j.value("aggregated", false);
    f.row_count = j.value("row_count", std::size_t{0});
    return f;
  } catch (const json::exception& e) {
    throw MalformedInput(std::string("bad feature vector: ") + e.what());
  }
}

json VisualizationNode::to_json() const {
  return json{{"type", to_string(chart_type)}, {"x", x},
              {"y", y_label()},               {"aggregate", to_string(aggregate)},
              {"binned", binned},             {"score", score}};
}

json to_json(const std::vector<VisualizationNode>& nodes) {
  json out = json::array();
  for (const auto& n : nodes) out.push_back(n.to_json());
  return out;
}

// ---------------------------------------------------------------------------
// Candidate enumeration

namespace {

std::optional<double> to_number(const Value& v) {
  if (const auto* i = std::get_if<std::int64_t>(&v)) return static_cast<double>(*i);
  if (const auto* d = std::get_if<double>(&v)) return *d;
  if (const auto* s = std::get_if<std::string>(&v)) {
    double out = 0;
    auto t = text::trim(*s);
    if (t.empty()) return std::nullopt;
    auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), out);
    if (ec == std::errc() && ptr == t.data() + t.size()) return out;
  }
  return std::nullopt;
}

struct ColumnStats {
  std::string name;
  AxisKind kind;
  std::size_t non_null = 0;
  std::size_t distinct = 0;
  bool non_negative = true;
  std::vector<std::optional<double>> numbers;  // numeric columns only
};

ColumnStats column_stats(const ResultTable& t, std::size_t c) {
  ColumnStats s{t.columns[c].name, axis_kind(t.columns[c].data_type), 0, 0, true, {}};
  std::unordered_set<std::string> seen;
  for (const auto& row : t.rows) {
    const Value& v = row[c];
    if (s.kind == AxisKind::Numeric) {
      auto n = to_number(v);
      s.numbers.push_back(n);
      if (n && *n < 0) s.non_negative = false;
    }
    if (is_null(v)) continue;
    ++s.non_null;
    seen.insert(value_to_text(v));
  }
  s.distinct = seen.size();
  return s;
}

std::optional<double> pearson(const std::vector<std::optional<double>>& a,
                              const std::vector<std::optional<double>>& b) {
  std::vector<std::pair<double, double>> pts;
  for (std::size_t i = 0; i < a.size() && i < b.size(); ++i) {
    if (a[i] && b[i]) pts.emplace_back(*a[i], *b[i]);
  }
  if (pts.size() < 2) return std::nullopt;
  double mx = 0, my = 0;
  for (auto [x, y] : pts) {
    mx += x;
    my += y;
  }
  mx /= static_cast<double>(pts.size());
  my /= static_cast<double>(pts.size());
  double sxy = 0, sxx = 0, syy = 0;
  for (auto [x, y] : pts) {
    sxy += (x - mx) * (y - my);
    sxx += (x - mx) * (x - mx);
    syy += (y - my) * (y - my);
  }
  if (sxx <= 0 || syy <= 0) return std::nullopt;
  double r = sxy / std::sqrt(sxx * syy);
  if (!std::isfinite(r)) return std::nullopt;
  return std::clamp(r, -1.0, 1.0);
}

constexpr std::size_t kMaxBarGroups = 50;
constexpr std::size_t kMinPieGroups = 2;
constexpr std::size_t kMaxPieGroups = 10;
constexpr std::size_t kMinScatterRows = 10;
constexpr std::size_t kHistogramBins = 10;

}  // namespace

std::vector<VisualizationNode> enumerate_candidates(const ResultTable& table) {
  const std::size_t rows = table.rows.size();
  if (table.columns.empty() || rows == 0) throw NoCandidates("the result has no rows to chart");

  std::vector<ColumnStats> stats;
  for (std::size_t c = 0; c < table.columns.size(); ++c) stats.push_back(column_stats(table, c));

  std::vector<VisualizationNode> out;
  auto emit = [&](ChartType type, std::size_t xi, std::optional<std::size_t> yi, Aggregate agg,
                  bool binned) {
    const ColumnStats& sx = stats[xi];
    VisualizationNode n;
    n.chart_type = type;
    n.x = sx.name;
    n.aggregate = agg;
    n.binned = binned;
    FeatureVector& f = n.features;
    f.chart_type = type;
    f.x_kind = sx.kind;
    f.y_kind = yi ? stats[*yi].kind : AxisKind::Numeric;
    f.row_count = rows;
    f.distinct_x = sx.distinct;
    f.distinct_ratio_x = static_cast<double>(sx.distinct) / static_cast<double>(rows);
    f.aggregated = agg != Aggregate::None;
    f.group_count = binned ? std::min(kHistogramBins, sx.distinct) : f.aggregated ? sx.distinct : rows;
    std::size_t null_rows = 0;
    for (const auto& row : table.rows) {
      if (is_null(row[xi]) || (yi && is_null(row[*yi]))) ++null_rows;
    }
    f.null_ratio = static_cast<double>(null_rows) / static_cast<double>(rows);
    if (yi) {
      n.y = stats[*yi].name;
      if (sx.kind == AxisKind::Numeric && stats[*yi].kind == AxisKind::Numeric) {
        f.correlation_xy = pearson(sx.numbers, stats[*yi].numbers);
      }
    }
    out.push_back(std::move(n));
  };

  for (std::size_t xi = 0; xi < stats.size(); ++xi) {
    const ColumnStats& sx = stats[xi];
    if (sx.non_null == 0) continue;
    const bool unique_x = sx.non_null == rows && sx.distinct == rows;
    const std::vector<Aggregate> value_aggs =
        unique_x ? std::vector<Aggregate>{Aggregate::None}
                 : std::vector<Aggregate>{Aggregate::Sum, Aggregate::Avg};

    std::vector<std::size_t> ys;
    for (std::size_t yi = 0; yi < stats.size(); ++yi) {
      if (yi != xi && stats[yi].kind == AxisKind::Numeric && stats[yi].non_null > 0) ys.push_back(yi);
    }

    switch (sx.kind) {
      case AxisKind::Categorical: {
        const bool bar_ok = sx.distinct <= kMaxBarGroups;
        const bool pie_ok = sx.distinct >= kMinPieGroups && sx.distinct <= kMaxPieGroups;
        if (!unique_x) {
          if (bar_ok) emit(ChartType::Bar, xi, std::nullopt, Aggregate::Count, false);
          if (pie_ok) emit(ChartType::Pie, xi, std::nullopt, Aggregate::Count, false);
        }
        for (auto yi : ys) {
          for (auto agg : value_aggs) {
            if (bar_ok) emit(ChartType::Bar, xi, yi, agg, false);
            if (pie_ok && stats[yi].non_negative) emit(ChartType::Pie, xi, yi, agg, false);
          }
        }
        break;
      }
      case AxisKind::Temporal:
      case AxisKind::Numeric: {
        if (sx.kind == AxisKind::Numeric) {
          emit(ChartType::Bar, xi, std::nullopt, Aggregate::Count, true);
        } else if (!unique_x) {
          emit(ChartType::Line, xi, std::nullopt, Aggregate::Count, false);
        }
        for (auto yi : ys) {
          emit(ChartType::Line, xi, yi, Aggregate::None, false);
          if (!unique_x) {
            emit(ChartType::Line, xi, yi, Aggregate::Sum, false);
            emit(ChartType::Line, xi, yi, Aggregate::Avg, false);
          }
          if (rows >= kMinScatterRows) emit(ChartType::Scatter, xi, yi, Aggregate::None, false);
        }
        break;
      }
    }
  }
  if (out.empty()) throw NoCandidates("no chart type fits the result columns");
  return out;
}

// ---------------------------------------------------------------------------
// Partial order

bool PartialOrderRule::prefers(const VisualizationNode& u, const VisualizationNode& v) const {
  switch (kind) {
    case Kind::PreferChart:
      if (u.chart_type != better || v.chart_type != worse) return false;
      if (u.x != v.x || u.y != v.y || u.aggregate != v.aggregate) return false;
      if (when_x_kind && u.features.x_kind != *when_x_kind) return false;
      if (min_distinct_x && u.features.distinct_x < *min_distinct_x) return false;
      return true;
    case Kind::PreferAggregated:
      return u.features.aggregated && !v.features.aggregated && u.chart_type == v.chart_type &&
             u.x == v.x && u.y == v.y &&
             static_cast<double>(u.features.group_count) <
                 static_cast<double>(v.features.row_count) * max_group_fraction;
    case Kind::PreferLowerNullRatio:
      return u.chart_type == v.chart_type && u.aggregate == v.aggregate &&
             u.features.null_ratio < v.features.null_ratio;
  }
  return false;
}

bool PartialOrderRules::prefers(const VisualizationNode& u, const VisualizationNode& v) const {
  return std::any_of(rules.begin(), rules.end(), [&](const auto& r) { return r.prefers(u, v); });
}

PartialOrderRules PartialOrderRules::from_json(const json& j) {
  PartialOrderRules out;
  try {
    for (const auto& r : j.at("rules")) {
      PartialOrderRule rule;
      const std::string kind = r.at("kind").get<std::string>();
      if (kind == "prefer_chart") {
        rule.kind = PartialOrderRule::Kind::PreferChart;
        rule.better = chart_type_from_string(r.at("better").get<std::string>());
        rule.worse = chart_type_from_string(r.at("worse").get<std::string>());
        if (r.contains("when")) {
          const auto& w = r["when"];
          if (w.contains("x_kind")) rule.when_x_kind = axis_kind_from_string(w["x_kind"].get<std::string>());
          if (w.contains("min_distinct_x")) rule.min_distinct_x = w["min_distinct_x"].get<std::size_t>();
        }
      } else if (kind == "prefer_aggregated") {
        rule.kind = PartialOrderRule::Kind::PreferAggregated;
        rule.max_group_fraction = r.value("max_group_fraction", 0.5);
      } else if (kind == "prefer_lower_null_ratio") {
        rule.kind = PartialOrderRule::Kind::PreferLowerNullRatio;
      } else {
        throw MalformedInput("unknown partial-order rule kind '" + kind + "'");
      }
      out.rules.push_back(rule);
    }
  } catch (const json::exception& e) {
    throw MalformedInput(std::string("bad partial-order rules: ") + e.what());
  }
  return out;
}

PartialOrderRules PartialOrderRules::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw MalformedInput("cannot open " + path);
  try {
    return from_json(json::parse(in));
  } catch (const json::parse_error& e) {
    throw MalformedInput(path + ": " + e.what());
  }
}

PartialOrderRules PartialOrderRules::defaults() {
  return load(default_data_dir() + "/viz/partial_order_rules.json");
}

std::vector<VisualizationNode> rank_partial_order(std::vector<VisualizationNode> nodes,
                                                  const PartialOrderRules& rules) {
  const std::size_t n = nodes.size();
  std::vector<std::vector<std::size_t>> out_edges(n);
  std::vector<std::size_t> in_degree(n, 0);
  for (std::size_t u = 0; u < n; ++u) {
    for (std::size_t v = 0; v < n; ++v) {
      if (u != v && rules.prefers(nodes[u], nodes[v])) {
        out_edges[u].push_back(v);
        ++in_degree[v];
      }
    }
  }
  std::vector<std::size_t> layer(n, 0);
  std::vector<std::size_t> ready;
  for (std::size_t i = 0; i < n; ++i) {
    if (in_degree[i] == 0) ready.push_back(i);
  }
  std::size_t processed = 0;
  while (!ready.empty()) {
    std::size_t u = ready.back();
    ready.pop_back();
    ++processed;
    for (std::size_t v : out_edges[u]) {
      layer[v] = std::max(layer[v], layer[u] + 1);
      if (--in_degree[v] == 0) ready.push_back(v);
    }
  }
  if (processed != n) throw CycleDetected("partial-order rules produce a cycle");

  const std::size_t max_layer = n ? *std::max_element(layer.begin(), layer.end()) : 0;
  for (std::size_t i = 0; i < n; ++i) {
    nodes[i].score = max_layer == 0 ? 1.0
                                    : static_cast<double>(max_layer - layer[i]) /
                                          static_cast<double>(max_layer);
  }
  return nodes;
}

// ---------------------------------------------------------------------------
// Learning to rank

double RankingModel::score(const FeatureVector& f) const {
  auto d = f.dense();
  return std::inner_product(d.begin(), d.end(), weights.begin(), 0.0);
}

std::vector<TrainingPair> load_training_pairs(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw MalformedInput("cannot open " + path);
  std::vector<TrainingPair> out;
  try {
    for (const auto& p : json::parse(in)) {
      out.push_back({FeatureVector::from_json(p.at("better")), FeatureVector::from_json(p.at("worse"))});
    }
  } catch (const json::exception& e) {
    throw MalformedInput(path + ": " + e.what());
  }
  return out;
}

RankingModel train_pairwise(const std::vector<TrainingPair>& pairs, std::size_t max_epochs) {
  if (pairs.empty()) throw DegenerateInput("no training pairs");
  std::vector<DenseFeatures> diffs;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    auto a = pairs[i].better.dense();
    auto b = pairs[i].worse.dense();
    if (a == b) {
      throw DegenerateInput("training pair " + std::to_string(i) +
                            " has identical features on both sides");
    }
    DenseFeatures d;
    for (std::size_t k = 0; k < kFeatureDims; ++k) d[k] = a[k] - b[k];
    diffs.push_back(d);
  }
  RankingModel model;
  model.pairs_consumed = pairs.size();
  for (std::size_t epoch = 0; epoch < max_epochs; ++epoch) {
    bool updated = false;
    for (const auto& d : diffs) {
      double margin = std::inner_product(d.begin(), d.end(), model.weights.begin(), 0.0);
      if (margin <= 0) {
        for (std::size_t k = 0; k < kFeatureDims; ++k) model.weights[k] += d[k];
        updated = true;
      }
    }
    if (!updated) break;
  }
  return model;
}

std::vector<VisualizationNode> rank_learned(std::vector<VisualizationNode> nodes,
                                            const RankingModel& model) {
  for (auto& n : nodes) n.score = model.score(n.features);
  normalize_scores(nodes);
  return nodes;
}

// ---------------------------------------------------------------------------
// Diversified top-k

double node_distance(const VisualizationNode& a, const VisualizationNode& b) {
  auto elements = [](const VisualizationNode& n) {
    return std::set<std::string>{"type=" + std::string(to_string(n.chart_type)), "x=" + n.x,
                                 "y=" + n.y_label(), "agg=" + std::string(to_string(n.aggregate))};
  };
  auto ea = elements(a);
  auto eb = elements(b);
  std::size_t common = 0;
  for (const auto& e : ea) common += eb.count(e);
  std::size_t uni = ea.size() + eb.size() - common;
  return uni == 0 ? 0.0 : 1.0 - static_cast<double>(common) / static_cast<double>(uni);
}

bool tie_break_less(const VisualizationNode& a, const VisualizationNode& b) {
  return std::tuple(a.chart_type, a.x, a.y_label(), a.aggregate) <
         std::tuple(b.chart_type, b.x, b.y_label(), b.aggregate);
}

void normalize_scores(std::vector<VisualizationNode>& nodes) {
  if (nodes.empty()) return;
  auto [lo, hi] = std::minmax_element(nodes.begin(), nodes.end(),
                                      [](const auto& a, const auto& b) { return a.score < b.score; });
  double min = lo->score, max = hi->score;
  for (auto& n : nodes) n.score = max > min ? (n.score - min) / (max - min) : 1.0;
}

namespace {

constexpr double kEps = 1e-12;

// Index order: higher value first, then the tie-break order, then position.
bool preferred(double va, std::size_t a, double vb, std::size_t b,
               const std::vector<VisualizationNode>& nodes) {
  if (va > vb + kEps) return true;
  if (vb > va + kEps) return false;
  if (tie_break_less(nodes[a], nodes[b])) return true;
  if (tie_break_less(nodes[b], nodes[a])) return false;
  return a < b;
}

}  // namespace

std::vector<VisualizationNode> rank_diversified(const std::vector<VisualizationNode>& nodes,
                                                const DiversifiedConfig& config) {
  const std::size_t k = std::min(config.k, nodes.size());
  std::vector<std::size_t> picked;
  std::vector<bool> taken(nodes.size(), false);
  std::vector<double> min_dist(nodes.size(), 1.0);
  while (picked.size() < k) {
    std::optional<std::size_t> best;
    double best_value = 0;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      if (taken[i]) continue;
      double value = picked.empty() ? nodes[i].score
                                    : config.lambda * nodes[i].score + (1 - config.lambda) * min_dist[i];
      if (!best || preferred(value, i, best_value, *best, nodes)) {
        best = i;
        best_value = value;
      }
    }
    taken[*best] = true;
    picked.push_back(*best);
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      if (!taken[i]) min_dist[i] = std::min(min_dist[i], node_distance(nodes[i], nodes[*best]));
    }
  }
  std::vector<VisualizationNode> out;
  for (auto i : picked) out.push_back(nodes[i]);
  return out;
}

Strategy strategy_from_string(std::string_view s) {
  if (text::iequals(s, "diversified")) return Strategy::Diversified;
  if (text::iequals(s, "partial_order")) return Strategy::PartialOrder;
  if (text::iequals(s, "learned")) return Strategy::Learned;
  throw MalformedInput("unknown ranking strategy '" + std::string(s) + "'");
}

std::vector<VisualizationNode> recommend(const ResultTable& table, const RankerOptions& options) {
  std::vector<VisualizationNode> nodes;
  try {
    nodes = enumerate_candidates(table);
  } catch (const NoCandidates&) {
    return {};
  }
  if (options.strategy == Strategy::Learned) {
    if (!options.model) throw InvalidRequest("learned ranking needs a trained model");
    nodes = rank_learned(std::move(nodes), *options.model);
  } else {
    nodes = rank_partial_order(std::move(nodes), options.rules);
    normalize_scores(nodes);
  }
  if (options.strategy == Strategy::Diversified) return rank_diversified(nodes, options.diversified);

  std::vector<std::size_t> order(nodes.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return preferred(nodes[a].score, a, nodes[b].score, b, nodes);
  });
  std::vector<VisualizationNode> out;
  for (std::size_t i = 0; i < order.size() && i < options.diversified.k; ++i) out.push_back(nodes[order[i]]);
  return out;
}

}  // namespace askdb::viz
