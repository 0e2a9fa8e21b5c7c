#include "mtcnn/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <json.hpp>

#include "mtcnn/errors.hpp"

namespace mtcnn {

namespace {

void check_two_classes(const std::vector<double>& scores, const std::vector<int>& labels) {
  if (scores.size() != labels.size())
    throw DataError("metrics: scores and labels differ in length");
  if (scores.empty()) throw DataError("metrics: empty input");
  bool pos = false, neg = false;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (!std::isfinite(scores[i])) throw DataError("metrics: non-finite score");
    (labels[i] ? pos : neg) = true;
  }
  if (!pos || !neg) throw DataError("metrics: both classes must be present");
}

}  // namespace

double ks_statistic(const std::vector<double>& scores, const std::vector<int>& labels) {
  check_two_classes(scores, labels);
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  std::size_t total_pos = 0;
  for (int l : labels) total_pos += static_cast<std::size_t>(l);
  const std::size_t total_neg = labels.size() - total_pos;

  double best = 0.0;
  std::size_t pos_seen = 0, neg_seen = 0;
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (labels[order[i]])
      ++pos_seen;
    else
      ++neg_seen;
    // evaluate only after a full tie group so the CDFs stay consistent
    if (i + 1 < order.size() && scores[order[i + 1]] == scores[order[i]]) continue;
    const double diff = std::fabs(static_cast<double>(pos_seen) / static_cast<double>(total_pos) -
                                  static_cast<double>(neg_seen) / static_cast<double>(total_neg));
    best = std::max(best, diff);
  }
  return 100.0 * best;
}

double information_value(const std::vector<double>& scores, const std::vector<int>& labels,
                         std::size_t bins) {
  check_two_classes(scores, labels);
  if (bins < 2) throw ConfigError("information_value: bins must be >= 2");

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  // quantile bins over the sorted order; tie groups never split
  struct BinCounts {
    std::size_t pos = 0, neg = 0;
  };
  std::vector<BinCounts> counts;
  const std::size_t n = order.size();
  std::size_t idx = 0;
  for (std::size_t b = 0; b < bins && idx < n; ++b) {
    const std::size_t remaining_bins = bins - b;
    const std::size_t take = (n - idx + remaining_bins - 1) / remaining_bins;  // ceil
    std::size_t j = idx + take;
    while (j < n && scores[order[j]] == scores[order[j - 1]]) ++j;
    BinCounts c;
    for (std::size_t i = idx; i < j; ++i) {
      if (labels[order[i]])
        ++c.pos;
      else
        ++c.neg;
    }
    counts.push_back(c);
    idx = j;
  }

  std::size_t total_pos = 0, total_neg = 0;
  for (const auto& c : counts) {
    total_pos += c.pos;
    total_neg += c.neg;
  }
  const double b_total = static_cast<double>(total_pos) + 0.5 * static_cast<double>(counts.size());
  const double g_total = static_cast<double>(total_neg) + 0.5 * static_cast<double>(counts.size());

  double iv = 0.0;
  for (const auto& c : counts) {
    const double g = (static_cast<double>(c.neg) + 0.5) / g_total;  // share of negatives (goods)
    const double b = (static_cast<double>(c.pos) + 0.5) / b_total;  // share of positives (bads)
    iv += (g - b) * std::log(g / b);
  }
  return iv;
}

DollarPrCurve dollar_pr_curve(const std::vector<double>& scores, const std::vector<int>& labels,
                              const std::vector<double>& amounts) {
  if (scores.size() != labels.size() || scores.size() != amounts.size())
    throw DataError("dollar_pr_curve: scores/labels/amounts differ in length");
  if (scores.empty()) throw DataError("dollar_pr_curve: empty input");
  double total_fraud = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (!std::isfinite(scores[i])) throw DataError("dollar_pr_curve: non-finite score");
    if (amounts[i] < 0) throw DataError("dollar_pr_curve: negative amount");
    if (labels[i]) total_fraud += amounts[i];
  }
  if (total_fraud <= 0.0) throw DataError("dollar_pr_curve: zero fraud dollars");

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

  DollarPrCurve curve;
  double flagged = 0.0, flagged_fraud = 0.0;
  double prev_recall = 0.0;
  for (std::size_t i = 0; i < order.size(); ++i) {
    flagged += amounts[order[i]];
    if (labels[order[i]]) flagged_fraud += amounts[order[i]];
    // emit one point per unique score, after its whole tie group
    if (i + 1 < order.size() && scores[order[i + 1]] == scores[order[i]]) continue;
    PrPoint p;
    p.threshold = scores[order[i]];
    p.precision = flagged > 0 ? flagged_fraud / flagged : 0.0;
    p.recall = flagged_fraud / total_fraud;
    curve.auc += (p.recall - prev_recall) * p.precision;
    prev_recall = p.recall;
    curve.points.push_back(p);
  }
  return curve;
}

OperatingPoint recall_at_precision(const DollarPrCurve& curve, double target_precision) {
  if (curve.points.empty()) throw DataError("recall_at_precision: empty curve");
  OperatingPoint best;
  bool found = false;
  for (const auto& p : curve.points) {
    if (p.precision < target_precision) continue;
    if (!found || p.recall > best.recall || (p.recall == best.recall && p.precision > best.precision)) {
      best = {p.threshold, p.precision, p.recall, true};
      found = true;
    }
  }
  if (found) return best;
  // infeasible target: report the max-precision point, flagged
  best = {curve.points[0].threshold, curve.points[0].precision, curve.points[0].recall, false};
  for (const auto& p : curve.points)
    if (p.precision > best.precision) best = {p.threshold, p.precision, p.recall, false};
  return best;
}

OperatingPoint precision_at_recall(const DollarPrCurve& curve, double target_recall) {
  if (curve.points.empty()) throw DataError("precision_at_recall: empty curve");
  OperatingPoint best;
  bool found = false;
  for (const auto& p : curve.points) {
    if (p.recall < target_recall) continue;
    if (!found || p.precision > best.precision ||
        (p.precision == best.precision && p.recall > best.recall)) {
      best = {p.threshold, p.precision, p.recall, true};
      found = true;
    }
  }
  if (found) return best;
  // infeasible target: report the max-recall point, flagged
  best = {curve.points[0].threshold, curve.points[0].precision, curve.points[0].recall, false};
  for (const auto& p : curve.points)
    if (p.recall > best.recall) best = {p.threshold, p.precision, p.recall, false};
  return best;
}

TaskMetrics evaluate_task(const std::vector<double>& scores, const std::vector<int>& labels,
                          const std::vector<double>& amounts, double p_target, double r_target) {
  TaskMetrics m;
  m.ks = ks_statistic(scores, labels);
  m.iv = information_value(scores, labels);
  auto curve = dollar_pr_curve(scores, labels, amounts);
  m.dollar_pr_auc = curve.auc;
  m.r_at_p = recall_at_precision(curve, p_target);
  m.r_at_p_target = p_target;
  m.p_at_r = precision_at_recall(curve, r_target);
  m.p_at_r_target = r_target;
  return m;
}

std::string metrics_report_json(const std::vector<TaskMetrics>& per_task) {
  nlohmann::json j;
  for (std::size_t t = 0; t < per_task.size(); ++t) {
    const auto& m = per_task[t];
    auto op = [](const OperatingPoint& p, double target) {
      return nlohmann::json{{"target", target},
                            {"threshold", p.threshold},
                            {"precision", p.precision},
                            {"recall", p.recall},
                            {"target_met", p.target_met}};
    };
    j["task_" + std::to_string(t + 1)] = {
        {"ks", m.ks},
        {"iv", m.iv},
        {"dollar_pr_auc", m.dollar_pr_auc},
        {"r_at_p", op(m.r_at_p, m.r_at_p_target)},
        {"p_at_r", op(m.p_at_r, m.p_at_r_target)},
    };
  }
  return j.dump(2);
}

}  // namespace mtcnn
