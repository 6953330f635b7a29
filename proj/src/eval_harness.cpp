#include "soccerforge/eval_harness.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>
#include <random>

#include <fmt/format.h>

#include "soccerforge/pseudo_json.hpp"

namespace soccerforge {
namespace {

constexpr std::string_view kJudgeHead =
    "The task is to classify the outputs of different models based on whether they correctly identified the given "
    "class. The score reflects the model's ability to correctly classify the Query into the Actual Label "
    "provided.\n"
    "\n"
    "### Scoring Criteria:\n"
    "- 0: Completely incorrect classification (model's answer does not match the Actual Label at all).\n"
    "- 10: Fully correct classification (model's answer exactly matches the Actual Label).\n"
    "\n"
    "### Inputs:\n";

constexpr std::string_view kJudgeTaskHead =
    "\n"
    "### Task:\n"
    "For each model's answer provided in the LLM-Answers dictionary:\n"
    "1. Assess whether the model's output correctly identifies the Actual Label.\n"
    "2. Assign a score from 0 to 10 based on the correctness of the classification. If the classification is fully "
    "correct, assign a score of 10. If it is completely incorrect, assign a score of 0. Partial correctness or near "
    "misses can be scored in between.\n"
    "3. Ensure no two models have the same score to clarify the comparison.\n";

constexpr std::string_view kJudgeOutputHead =
    "Output a dictionary enclosed by ``` on both sides with three keys:\n"
    "- \"scores\": A dictionary where each key is the model name from the LLM-Answers dictionary, and the value is "
    "the score (range 0-10) assigned to the model's answer.\n"
    "- \"reason\": A dictionary where each key is the model name, and the value is a string explanation for why the "
    "score was assigned to the respective model.\n";

constexpr std::string_view kJudgeTail =
    "\n"
    "### Output:\n"
    "No coding is required. Directly provide the expected output result as a valid Python JSON dict of dict "
    "enclosed in ```.";

std::string trim_lower(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r\n");
  std::string out(s.substr(b, e - b + 1));
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string num(double v) { return fmt::format("{:.4f}", v); }

std::uint64_t uniform_below(std::mt19937_64& gen, std::uint64_t bound) {
  const std::uint64_t limit = std::mt19937_64::max() - (std::mt19937_64::max() % bound);
  std::uint64_t r;
  do {
    r = gen();
  } while (r >= limit);
  return r % bound;
}

}  // namespace

// --- class sets -------------------------------------------------------------------

ClassSet ClassSet::six() {
  return custom("six", {"Ball out of play", "Foul", "Goal", "Shots off target", "Shots on target", "Throw-in"});
}

ClassSet ClassSet::sixteen() {
  return custom("sixteen", {"Ball out of play", "Clearance", "Corner", "Direct free-kick", "Foul", "Goal",
                            "Indirect free-kick", "Kick-off", "Offside", "Penalty", "Red card", "Shots off target",
                            "Shots on target", "Substitution", "Throw-in", "Yellow card"});
}

ClassSet ClassSet::custom(std::string name, std::vector<std::string> labels) {
  if (labels.empty()) throw std::invalid_argument("class set is empty");
  std::set<std::string> seen;
  for (const auto& l : labels) {
    if (l.empty()) throw std::invalid_argument("empty class label");
    if (l == kWrongPrediction) throw std::invalid_argument("class label collides with the sentinel");
    if (!seen.insert(l).second) throw std::invalid_argument("duplicate class label: " + l);
  }
  ClassSet c;
  c.name = std::move(name);
  c.labels = std::move(labels);
  return c;
}

int ClassSet::index_of(std::string_view label) const {
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == label) return static_cast<int>(i);
  }
  return -1;
}

std::string render_class_list(const ClassSet& classes) {
  std::string out;
  const auto n = classes.labels.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (i > 0) out += (i + 1 == n) ? (n > 2 ? ", or " : " or ") : ", ";
    out += "'" + classes.labels[i] + "'";
  }
  return out;
}

std::string number_word(std::size_t n) {
  static const char* words[] = {"zero",    "one",     "two",       "three",    "four",     "five",   "six",
                                "seven",   "eight",   "nine",      "ten",      "eleven",   "twelve", "thirteen",
                                "fourteen", "fifteen", "sixteen", "seventeen", "eighteen", "nineteen", "twenty"};
  return n <= 20 ? words[n] : std::to_string(n);
}

// --- judge ------------------------------------------------------------------------

std::string build_judge_prompt(std::string_view query, std::string_view label,
                               const std::map<std::string, std::string>& answers, const ClassSet& classes) {
  if (answers.empty()) throw std::invalid_argument("judge prompt needs at least one model answer");
  const auto count = number_word(classes.labels.size());
  std::string out(kJudgeHead);
  out += fmt::format("Query: {}\nActual Label: \"{}\"\nLLM-Answers: {}\n", query, label, json(answers).dump());
  out += kJudgeTaskHead;
  out += fmt::format("4. predicted_class could be '{}' if the model's answer is different from the {} possible classes\n",
                     classes.wrong_sentinel, count);
  out += "\n";
  out += kJudgeOutputHead;
  out += fmt::format(
      "- \"predicted_class\": A dictionary where each key is the model name, and the value is one best predicted "
      "class only out of the {} possible classes:  {}. Output '{}' if the  the model's answer does not match any of "
      "the possible classes.\n",
      count, render_class_list(classes), classes.wrong_sentinel);
  out += kJudgeTail;
  return out;
}

json verdict_json(const JudgeVerdict& v) {
  return json{{"scores", v.scores}, {"reason", v.reasons}, {"predicted_class", v.predicted_class},
              {"warnings", v.warnings}};
}

JudgeVerdict verdict_from_json(const json& j) {
  JudgeVerdict v;
  v.scores = j.at("scores").get<std::map<std::string, int>>();
  v.reasons = j.at("reason").get<std::map<std::string, std::string>>();
  v.predicted_class = j.at("predicted_class").get<std::map<std::string, std::string>>();
  v.warnings = j.value("warnings", std::vector<std::string>{});
  return v;
}

MissingModel::MissingModel(std::vector<std::string> models)
    : std::runtime_error([&] {
        std::string msg = "judge output lacks models:";
        for (const auto& m : models) msg += " " + m;
        return msg;
      }()),
      models_(std::move(models)) {}

JudgeVerdict parse_judge_output(std::string_view raw, const std::set<std::string>& expected_models,
                                const ClassSet& classes) {
  json obj;
  try {
    obj = parse_pseudo_json(raw);
  } catch (const PseudoJsonError& e) {
    throw UnparseableVerdict(e.what(), std::string(raw));
  }
  for (const char* key : {"scores", "reason", "predicted_class"}) {
    if (!obj.is_object() || !obj.contains(key) || !obj[key].is_object()) {
      throw UnparseableVerdict(fmt::format("judge output lacks an object under \"{}\"", key), std::string(raw));
    }
  }
  const auto& scores = obj["scores"];
  const auto& reasons = obj["reason"];
  const auto& classes_out = obj["predicted_class"];

  std::vector<std::string> missing;
  for (const auto& m : expected_models) {
    if (!scores.contains(m) || !reasons.contains(m) || !classes_out.contains(m)) missing.push_back(m);
  }
  if (!missing.empty()) throw MissingModel(std::move(missing));

  JudgeVerdict v;
  for (const auto& m : expected_models) {
    const auto& s = scores[m];
    double value = 0.0;
    if (s.is_number()) {
      value = s.get<double>();
    } else if (s.is_string()) {
      const auto& text = s.get_ref<const std::string&>();
      try {
        std::size_t used = 0;
        value = std::stod(text, &used);
        if (text.find_first_not_of(" \t", used) != std::string::npos) throw NonNumericScore(m);
      } catch (const std::logic_error&) {
        throw NonNumericScore(m);
      }
      v.warnings.push_back(fmt::format("{}: score given as text \"{}\"", m, text));
    } else {
      throw NonNumericScore(m);
    }
    if (!std::isfinite(value)) throw NonNumericScore(m);
    double rounded = std::round(value);
    if (rounded != value) v.warnings.push_back(fmt::format("{}: score {} rounded", m, value));
    if (rounded < 0 || rounded > 10) {
      v.warnings.push_back(fmt::format("{}: score {} clamped to [0, 10]", m, value));
      rounded = std::clamp(rounded, 0.0, 10.0);
    }
    v.scores[m] = static_cast<int>(rounded);

    const auto& r = reasons[m];
    v.reasons[m] = r.is_string() ? r.get<std::string>() : r.dump();

    const auto& pc = classes_out[m];
    std::string predicted = pc.is_string() ? pc.get<std::string>() : pc.dump();
    if (!classes.contains(predicted) && predicted != classes.wrong_sentinel) {
      const auto key = trim_lower(predicted);
      std::string canonical;
      for (const auto& l : classes.labels) {
        if (trim_lower(l) == key) canonical = l;
      }
      if (canonical.empty() && key == trim_lower(classes.wrong_sentinel)) canonical = classes.wrong_sentinel;
      if (canonical.empty()) {
        v.warnings.push_back(fmt::format("{}: predicted class \"{}\" outside the set", m, predicted));
        canonical = classes.wrong_sentinel;
      }
      predicted = canonical;
    }
    v.predicted_class[m] = predicted;
  }
  for (const auto& [m, _] : scores.items()) {
    if (!expected_models.contains(m)) v.warnings.push_back(fmt::format("unexpected model {} ignored", m));
  }
  return v;
}

// --- confusion and metrics ----------------------------------------------------------

std::int64_t ConfusionMatrix::total() const {
  std::int64_t t = 0;
  for (std::size_t i = 0; i < counts.size(); ++i) t += row_sum(i);
  return t;
}

std::int64_t ConfusionMatrix::row_sum(std::size_t t) const {
  return std::accumulate(counts[t].begin(), counts[t].end(), std::int64_t{0}) + sentinel_counts[t];
}

std::int64_t ConfusionMatrix::col_sum(std::size_t p) const {
  std::int64_t s = 0;
  for (const auto& row : counts) s += row[p];
  return s;
}

std::int64_t ConfusionMatrix::sentinel_sum() const {
  return std::accumulate(sentinel_counts.begin(), sentinel_counts.end(), std::int64_t{0});
}

ConfusionMatrix confusion(std::span<const std::string> truth, std::span<const std::string> pred,
                          const ClassSet& classes) {
  if (truth.size() != pred.size()) {
    throw LengthMismatch(fmt::format("{} truth labels vs {} predictions", truth.size(), pred.size()));
  }
  const auto n = classes.labels.size();
  ConfusionMatrix cm;
  cm.labels = classes.labels;
  cm.sentinel = classes.wrong_sentinel;
  cm.counts.assign(n, std::vector<std::int64_t>(n, 0));
  cm.sentinel_counts.assign(n, 0);
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const int t = classes.index_of(truth[i]);
    if (t < 0) throw UnknownTruthLabel(truth[i]);
    const int p = classes.index_of(pred[i]);
    if (p < 0) {
      ++cm.sentinel_counts[t];
    } else {
      ++cm.counts[t][p];
    }
  }
  return cm;
}

MetricsReport metrics(const ConfusionMatrix& cm) {
  const std::size_t n = cm.labels.size();
  const std::int64_t total = cm.total();
  if (total < 1) throw std::invalid_argument("metrics of an empty confusion matrix");

  // Square matrix with the sentinel as an extra class that never occurs in truth.
  const std::size_t k = n + 1;
  std::vector<std::int64_t> rows(k, 0), cols(k, 0);
  std::int64_t trace = 0;
  for (std::size_t t = 0; t < n; ++t) {
    for (std::size_t p = 0; p < n; ++p) {
      rows[t] += cm.counts[t][p];
      cols[p] += cm.counts[t][p];
    }
    rows[t] += cm.sentinel_counts[t];
    cols[n] += cm.sentinel_counts[t];
    trace += cm.counts[t][t];
  }

  MetricsReport r;
  r.total = total;
  r.correct = trace;
  r.accuracy = static_cast<double>(trace) / static_cast<double>(total);
  r.hamming_loss = 1.0 - r.accuracy;

  std::size_t present = 0;
  for (std::size_t c = 0; c < k; ++c) {
    const bool sentinel = c == n;
    if (sentinel && cols[n] == 0) continue;
    const std::int64_t tp = sentinel ? 0 : cm.counts[c][c];
    ClassMetrics m;
    m.label = sentinel ? cm.sentinel : cm.labels[c];
    m.support = rows[c];
    m.precision = cols[c] > 0 ? static_cast<double>(tp) / static_cast<double>(cols[c]) : 0.0;
    m.recall = rows[c] > 0 ? static_cast<double>(tp) / static_cast<double>(rows[c]) : 0.0;
    m.f1 = (rows[c] + cols[c]) > 0 ? 2.0 * static_cast<double>(tp) / static_cast<double>(rows[c] + cols[c]) : 0.0;
    if (rows[c] > 0 || cols[c] > 0) {
      ++present;
      r.macro_precision += m.precision;
      r.macro_recall += m.recall;
      r.macro_f1 += m.f1;
    }
    r.weighted_precision += m.precision * static_cast<double>(m.support);
    r.weighted_recall += m.recall * static_cast<double>(m.support);
    r.weighted_f1 += m.f1 * static_cast<double>(m.support);
    r.per_class.push_back(std::move(m));
  }
  if (present > 0) {
    r.macro_precision /= static_cast<double>(present);
    r.macro_recall /= static_cast<double>(present);
    r.macro_f1 /= static_cast<double>(present);
  }
  r.weighted_precision /= static_cast<double>(total);
  r.weighted_recall /= static_cast<double>(total);
  r.weighted_f1 /= static_cast<double>(total);

  std::int64_t sum_rc = 0, sum_rr = 0, sum_cc = 0;
  for (std::size_t c = 0; c < k; ++c) {
    sum_rc += rows[c] * cols[c];
    sum_rr += rows[c] * rows[c];
    sum_cc += cols[c] * cols[c];
  }
  const std::int64_t kappa_den = total * total - sum_rc;
  if (kappa_den == 0) {
    r.cohen_kappa = 0.0;
    r.kappa_degenerate = true;
  } else {
    r.cohen_kappa = static_cast<double>(total * trace - sum_rc) / static_cast<double>(kappa_den);
  }
  const double mcc_den = std::sqrt(static_cast<double>(total * total - sum_cc)) *
                         std::sqrt(static_cast<double>(total * total - sum_rr));
  r.mcc = mcc_den == 0.0 ? 0.0 : static_cast<double>(trace * total - sum_rc) / mcc_den;
  return r;
}

ConfusionMatrix reconstruct_confusion(std::span<const ReportRow> rows, const ClassSet& classes) {
  const std::size_t n = classes.labels.size();
  std::vector<std::int64_t> support(n, 0), tp(n, 0), predicted(n, 0);
  std::vector<bool> seen(n, false);
  for (const auto& row : rows) {
    if (row.label == classes.wrong_sentinel) continue;
    const int c = classes.index_of(row.label);
    if (c < 0) throw UnknownTruthLabel(row.label);
    seen[c] = true;
    support[c] = row.support;
    tp[c] = std::llround(row.recall * static_cast<double>(row.support));
    const long target = std::lround(row.precision * 100.0);
    predicted[c] = tp[c];
    if (tp[c] > 0) {
      for (std::int64_t m = tp[c]; m <= tp[c] * 200 + 1; ++m) {
        if (std::lround(100.0 * static_cast<double>(tp[c]) / static_cast<double>(m)) == target) {
          predicted[c] = m;
          break;
        }
      }
    }
  }
  for (std::size_t c = 0; c < n; ++c) {
    if (!seen[c]) throw std::invalid_argument("report lacks a row for " + classes.labels[c]);
  }

  ConfusionMatrix cm;
  cm.labels = classes.labels;
  cm.sentinel = classes.wrong_sentinel;
  cm.counts.assign(n, std::vector<std::int64_t>(n, 0));
  cm.sentinel_counts.assign(n, 0);
  std::vector<std::int64_t> spare(n);
  for (std::size_t c = 0; c < n; ++c) {
    cm.counts[c][c] = tp[c];
    spare[c] = predicted[c] - tp[c];
  }
  for (std::size_t t = 0; t < n; ++t) {
    for (std::int64_t miss = support[t] - tp[t]; miss > 0; --miss) {
      std::size_t best = n;
      for (std::size_t p = 0; p < n; ++p) {
        if (p != t && spare[p] > 0 && (best == n || spare[p] > spare[best])) best = p;
      }
      if (best == n) {
        ++cm.sentinel_counts[t];
      } else {
        ++cm.counts[t][best];
        --spare[best];
      }
    }
  }
  return cm;
}

// --- score distributions ----------------------------------------------------------

ScoreDistribution score_stats(std::span<const int> scores, std::string model) {
  if (scores.empty()) throw std::invalid_argument("score_stats of an empty list");
  std::vector<double> x(scores.begin(), scores.end());
  std::sort(x.begin(), x.end());
  const auto n = x.size();
  ScoreDistribution d;
  d.model = std::move(model);
  d.n = n;
  d.min = x.front();
  d.max = x.back();
  d.mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n);
  double ss = 0.0;
  for (double v : x) ss += (v - d.mean) * (v - d.mean);
  d.stddev = std::sqrt(ss / static_cast<double>(n));
  auto quantile = [&](double p) {
    const double h = static_cast<double>(n - 1) * p;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    if (lo + 1 >= n) return x[n - 1];
    return x[lo] + (h - static_cast<double>(lo)) * (x[lo + 1] - x[lo]);
  };
  d.q1 = quantile(0.25);
  d.median = quantile(0.5);
  d.q3 = quantile(0.75);
  return d;
}

// --- task construction --------------------------------------------------------------

std::string build_classification_query(const ClassSet& classes) {
  return fmt::format(
      "Which one of the following {} soccer events is shown in this video clip: {}? Answer with exactly one of "
      "these classes and justify your choice based on what is visible in the clip.",
      number_word(classes.labels.size()), render_class_list(classes));
}

json eval_item_json(const EvalItem& item) {
  return json{{"clip_id", item.clip_id},
              {"match_id", item.match_id},
              {"media_path", item.media_path},
              {"label", item.label}};
}

EvalItem eval_item_from_json(const json& j) {
  return EvalItem{j.at("clip_id").get<std::string>(), j.at("match_id").get<std::string>(),
                  j.at("media_path").get<std::string>(), j.at("label").get<std::string>()};
}

std::vector<EvalItem> sample_per_class(std::span<const EvalItem> items, const ClassSet& classes,
                                       std::size_t per_class, std::uint64_t seed) {
  std::vector<std::vector<EvalItem>> groups(classes.labels.size());
  for (const auto& item : items) {
    const int c = classes.index_of(item.label);
    if (c >= 0) groups[c].push_back(item);
  }
  std::mt19937_64 gen(seed);
  std::vector<EvalItem> out;
  for (auto& g : groups) {
    std::sort(g.begin(), g.end(), [](const EvalItem& a, const EvalItem& b) { return a.clip_id < b.clip_id; });
    for (std::size_t i = g.size(); i > 1; --i) std::swap(g[i - 1], g[uniform_below(gen, i)]);
    if (g.size() > per_class) g.resize(per_class);
    std::sort(g.begin(), g.end(), [](const EvalItem& a, const EvalItem& b) { return a.clip_id < b.clip_id; });
    out.insert(out.end(), g.begin(), g.end());
  }
  return out;
}

// --- report files -----------------------------------------------------------------

std::string per_class_csv(const MetricsReport& r) {
  std::string out = "Class,Precision,Recall,F1,Support\n";
  for (const auto& m : r.per_class) {
    out += fmt::format("{},{},{},{},{}\n", csv_field(m.label), num(m.precision), num(m.recall), num(m.f1), m.support);
  }
  out += fmt::format("Accuracy,,,{},{}\n", num(r.accuracy), r.total);
  out += fmt::format("Macro avg,{},{},{},{}\n", num(r.macro_precision), num(r.macro_recall), num(r.macro_f1), r.total);
  out += fmt::format("Weighted avg,{},{},{},{}\n", num(r.weighted_precision), num(r.weighted_recall),
                     num(r.weighted_f1), r.total);
  return out;
}

std::string summary_csv(const std::vector<std::pair<std::string, MetricsReport>>& rows) {
  std::string out = "Model,Precision (wt),Recall (wt),F1 Score (wt),Cohen Kappa,MCC,Hamming Loss\n";
  for (const auto& [model, r] : rows) {
    out += fmt::format("{},{},{},{},{},{},{}\n", csv_field(model), num(r.weighted_precision), num(r.weighted_recall),
                       num(r.weighted_f1), num(r.cohen_kappa), num(r.mcc), num(r.hamming_loss));
  }
  return out;
}

std::string violin_csv(const std::vector<ScoreDistribution>& dists) {
  std::string out = "model,statistic,value\n";
  for (const auto& d : dists) {
    const auto m = csv_field(d.model);
    out += fmt::format("{},n,{}\n", m, d.n);
    for (const auto& [name, v] : std::initializer_list<std::pair<const char*, double>>{
             {"mean", d.mean}, {"stddev", d.stddev}, {"min", d.min}, {"q1", d.q1},
             {"median", d.median}, {"q3", d.q3}, {"max", d.max}}) {
      out += fmt::format("{},{},{}\n", m, name, num(v));
    }
  }
  return out;
}

std::string confusion_csv(const ConfusionMatrix& cm) {
  std::string out = "truth";
  for (const auto& l : cm.labels) out += "," + csv_field(l);
  out += "," + csv_field(cm.sentinel) + "\n";
  for (std::size_t t = 0; t < cm.labels.size(); ++t) {
    out += csv_field(cm.labels[t]);
    for (auto v : cm.counts[t]) out += fmt::format(",{}", v);
    out += fmt::format(",{}\n", cm.sentinel_counts[t]);
  }
  return out;
}

}  // namespace soccerforge
