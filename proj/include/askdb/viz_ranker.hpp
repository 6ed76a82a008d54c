#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "askdb/result_table.hpp"

namespace askdb::viz {

enum class ChartType { Bar, Line, Pie, Scatter };
enum class AxisKind { Categorical, Numeric, Temporal };
enum class Aggregate { None, Sum, Avg, Count };

std::string_view to_string(ChartType t);
std::string_view to_string(AxisKind k);
std::string_view to_string(Aggregate a);
ChartType chart_type_from_string(std::string_view s);
AxisKind axis_kind_from_string(std::string_view s);
Aggregate aggregate_from_string(std::string_view s);

AxisKind axis_kind(DataType t);

inline constexpr std::size_t kFeatureDims = 15;
using DenseFeatures = std::array<double, kFeatureDims>;

struct FeatureVector {
  ChartType chart_type = ChartType::Bar;
  AxisKind x_kind = AxisKind::Categorical;
  AxisKind y_kind = AxisKind::Numeric;
  double distinct_ratio_x = 0;           // distinct x values / rows
  std::size_t distinct_x = 0;
  std::optional<double> correlation_xy;  // Pearson, only when both axes are numeric columns
  std::size_t group_count = 0;           // groups (or bins) the chart draws
  double null_ratio = 0;                 // rows with a null on either axis / rows
  bool aggregated = false;
  std::size_t row_count = 0;

  // [bar, line, pie, scatter, x_cat, x_num, x_temp, y_cat, y_num, y_temp,
  //  distinct_ratio, correlation (0 when undefined), log-scaled group count,
  //  null_ratio, aggregated]
  DenseFeatures dense() const;

  nlohmann::json to_json() const;
  static FeatureVector from_json(const nlohmann::json& j);
};

struct VisualizationNode {
  ChartType chart_type = ChartType::Bar;
  std::string x;
  std::optional<std::string> y;  // empty: the row count
  Aggregate aggregate = Aggregate::None;
  bool binned = false;           // histogram-style bar over a numeric x
  FeatureVector features;
  double score = 0;

  std::string y_label() const { return y ? *y : "count"; }
  nlohmann::json to_json() const;  // {type, x, y, aggregate, binned, score}
};

// Every valid (chart, x, y, aggregate) combination for the table.
// Throws NoCandidates when nothing qualifies.
std::vector<VisualizationNode> enumerate_candidates(const ResultTable& table);

// ---------------------------------------------------------------------------
// Partial order

struct PartialOrderRule {
  enum class Kind { PreferChart, PreferAggregated, PreferLowerNullRatio };
  Kind kind = Kind::PreferChart;
  // PreferChart
  ChartType better = ChartType::Bar;
  ChartType worse = ChartType::Bar;
  std::optional<AxisKind> when_x_kind;
  std::optional<std::size_t> min_distinct_x;
  // PreferAggregated
  double max_group_fraction = 0.5;

  // True when this rule places u strictly before v.
  bool prefers(const VisualizationNode& u, const VisualizationNode& v) const;
};

struct PartialOrderRules {
  std::vector<PartialOrderRule> rules;

  static PartialOrderRules from_json(const nlohmann::json& j);
  static PartialOrderRules load(const std::string& path);
  static PartialOrderRules defaults();  // data/viz/partial_order_rules.json contents

  bool prefers(const VisualizationNode& u, const VisualizationNode& v) const;
};

// Layers the "u is better than v" graph by longest path from the sources and
// scores each node (max_layer - layer) / max_layer; 1.0 everywhere when the
// graph has no edges. Throws CycleDetected when the rules conflict.
std::vector<VisualizationNode> rank_partial_order(std::vector<VisualizationNode> nodes,
                                                  const PartialOrderRules& rules);

// ---------------------------------------------------------------------------
// Learning to rank

struct RankingModel {
  DenseFeatures weights{};
  std::size_t pairs_consumed = 0;

  double score(const FeatureVector& f) const;
  bool better(const FeatureVector& a, const FeatureVector& b) const { return score(a) > score(b); }
};

struct TrainingPair {
  FeatureVector better;
  FeatureVector worse;
};

std::vector<TrainingPair> load_training_pairs(const std::string& path);

// Perceptron over difference vectors: w += (a - b) whenever w.(a - b) <= 0,
// until an epoch makes no update or max_epochs pass.
// Throws DegenerateInput for a pair with identical dense vectors.
RankingModel train_pairwise(const std::vector<TrainingPair>& pairs, std::size_t max_epochs = 1000);

std::vector<VisualizationNode> rank_learned(std::vector<VisualizationNode> nodes,
                                            const RankingModel& model);

// ---------------------------------------------------------------------------
// Diversified top-k

// Jaccard distance between {type, x, y, aggregate} element sets.
double node_distance(const VisualizationNode& a, const VisualizationNode& b);

struct DiversifiedConfig {
  std::size_t k = 3;
  double lambda = 0.5;
};

// Greedy max-marginal selection on the nodes' scores. Ties go to
// (chart type order, x, y, aggregate order, input position).
std::vector<VisualizationNode> rank_diversified(const std::vector<VisualizationNode>& nodes,
                                                const DiversifiedConfig& config = {});

// Min-max rescaling of scores into [0,1]; equal scores all become 1.
void normalize_scores(std::vector<VisualizationNode>& nodes);

// The deterministic node order used to break score ties.
bool tie_break_less(const VisualizationNode& a, const VisualizationNode& b);

enum class Strategy { Diversified, PartialOrder, Learned };
Strategy strategy_from_string(std::string_view s);

struct RankerOptions {
  Strategy strategy = Strategy::Diversified;
  DiversifiedConfig diversified;
  PartialOrderRules rules = PartialOrderRules::defaults();
  std::optional<RankingModel> model;  // required for Learned
};

// Enumerates, scores and orders candidates; returns at most diversified.k
// nodes. Returns an empty list when the table has no valid chart.
std::vector<VisualizationNode> recommend(const ResultTable& table, const RankerOptions& options);

nlohmann::json to_json(const std::vector<VisualizationNode>& nodes);

}  // namespace askdb::viz
