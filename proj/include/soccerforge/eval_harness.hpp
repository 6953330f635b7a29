#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace soccerforge {

using json = nlohmann::json;

inline constexpr std::string_view kWrongPrediction = "Wrong Prediction";

/// Ordered label set of one classification task.
struct ClassSet {
  std::string name;
  std::vector<std::string> labels;
  std::string wrong_sentinel = std::string(kWrongPrediction);

  static ClassSet six();
  static ClassSet sixteen();
  /// Throws std::invalid_argument on empty, duplicate or sentinel-named labels.
  static ClassSet custom(std::string name, std::vector<std::string> labels);

  /// -1 when absent.
  int index_of(std::string_view label) const;
  bool contains(std::string_view label) const { return index_of(label) >= 0; }
};

/// "'A', 'B', or 'C'" as used in the judge and query text.
std::string render_class_list(const ClassSet& classes);

/// "six", "sixteen", ...; digits past twenty.
std::string number_word(std::size_t n);

// --- judge ----------------------------------------------------------------------

/// Judge rubric with the query, the quoted label and the answers (as a JSON
/// object) filled in. Throws std::invalid_argument when answers is empty.
std::string build_judge_prompt(std::string_view query, std::string_view label,
                               const std::map<std::string, std::string>& answers, const ClassSet& classes);

struct JudgeVerdict {
  std::map<std::string, int> scores;
  std::map<std::string, std::string> reasons;
  std::map<std::string, std::string> predicted_class;
  std::vector<std::string> warnings;

  bool operator==(const JudgeVerdict&) const = default;
};

json verdict_json(const JudgeVerdict& v);
JudgeVerdict verdict_from_json(const json& j);

class UnparseableVerdict : public std::runtime_error {
 public:
  UnparseableVerdict(const std::string& what, std::string raw) : std::runtime_error(what), raw_(std::move(raw)) {}
  const std::string& raw() const { return raw_; }

 private:
  std::string raw_;
};

class MissingModel : public std::runtime_error {
 public:
  explicit MissingModel(std::vector<std::string> models);
  const std::vector<std::string>& models() const { return models_; }

 private:
  std::vector<std::string> models_;
};

class NonNumericScore : public std::runtime_error {
 public:
  explicit NonNumericScore(std::string model)
      : std::runtime_error("non-numeric score for model " + model), model_(std::move(model)) {}
  const std::string& model() const { return model_; }

 private:
  std::string model_;
};

/// Fenced or bare pseudo-JSON with "scores", "reason", "predicted_class".
/// Scores are rounded and clamped to [0, 10]; predicted classes outside the
/// set become the sentinel. Adjustments are recorded in warnings.
JudgeVerdict parse_judge_output(std::string_view raw, const std::set<std::string>& expected_models,
                                const ClassSet& classes);

// --- classification metrics -------------------------------------------------------

/// counts[t][p] over the class labels; predictions outside the set go to
/// sentinel_counts[t].
struct ConfusionMatrix {
  std::vector<std::string> labels;
  std::string sentinel = std::string(kWrongPrediction);
  std::vector<std::vector<std::int64_t>> counts;
  std::vector<std::int64_t> sentinel_counts;

  std::int64_t total() const;
  std::int64_t row_sum(std::size_t t) const;
  std::int64_t col_sum(std::size_t p) const;
  std::int64_t sentinel_sum() const;

  bool operator==(const ConfusionMatrix&) const = default;
};

class LengthMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class UnknownTruthLabel : public std::invalid_argument {
 public:
  explicit UnknownTruthLabel(const std::string& label)
      : std::invalid_argument("truth label not in class set: " + label) {}
};

ConfusionMatrix confusion(std::span<const std::string> truth, std::span<const std::string> pred,
                          const ClassSet& classes);

struct ClassMetrics {
  std::string label;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::int64_t support = 0;
};

struct MetricsReport {
  /// Class labels in set order, then the sentinel when anything was predicted as it.
  /// Macro averages cover the entries with nonzero support or predictions.
  std::vector<ClassMetrics> per_class;
  double accuracy = 0.0;
  double macro_precision = 0.0;
  double macro_recall = 0.0;
  double macro_f1 = 0.0;
  double weighted_precision = 0.0;
  double weighted_recall = 0.0;
  double weighted_f1 = 0.0;
  double cohen_kappa = 0.0;
  bool kappa_degenerate = false;  // expected agreement was 1; kappa reported as 0
  double mcc = 0.0;
  double hamming_loss = 0.0;
  std::int64_t correct = 0;
  std::int64_t total = 0;
};

/// Throws std::invalid_argument on an empty matrix.
MetricsReport metrics(const ConfusionMatrix& cm);

/// One row of a published per-class report.
struct ReportRow {
  std::string label;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::int64_t support = 0;
};

/// A confusion matrix consistent with a two-decimal per-class report:
/// true positives from recall x support, predicted totals as the smallest
/// count that reproduces the rounded precision, misses spread over columns
/// with spare predicted mass and the rest assigned to the sentinel.
ConfusionMatrix reconstruct_confusion(std::span<const ReportRow> rows, const ClassSet& classes);

// --- score distributions --------------------------------------------------------

struct ScoreDistribution {
  std::string model;
  std::size_t n = 0;
  double mean = 0.0;
  double stddev = 0.0;  // population
  double min = 0.0;
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
  double max = 0.0;
};

/// Quartiles by linear interpolation at rank (n - 1) p. Throws on empty input.
ScoreDistribution score_stats(std::span<const int> scores, std::string model = {});

// --- task construction ------------------------------------------------------------

std::string build_classification_query(const ClassSet& classes);

struct EvalItem {
  std::string clip_id;
  std::string match_id;
  std::string media_path;
  std::string label;

  bool operator==(const EvalItem&) const = default;
};

json eval_item_json(const EvalItem& item);
EvalItem eval_item_from_json(const json& j);

/// At most per_class items of each class, chosen by a seeded shuffle of the
/// clip-id-sorted candidates. Items with labels outside the set are dropped.
/// Output is ordered by class, then clip id.
std::vector<EvalItem> sample_per_class(std::span<const EvalItem> items, const ClassSet& classes,
                                       std::size_t per_class, std::uint64_t seed);

// --- report files -----------------------------------------------------------------

std::string per_class_csv(const MetricsReport& report);
std::string summary_csv(const std::vector<std::pair<std::string, MetricsReport>>& rows);
std::string violin_csv(const std::vector<ScoreDistribution>& dists);
std::string confusion_csv(const ConfusionMatrix& cm);

}  // namespace soccerforge
