#pragma once

#include <string>
#include <vector>

namespace mtcnn {

/// Kolmogorov-Smirnov statistic on the 0-100 scale:
/// 100 * max over thresholds of |CDF_pos - CDF_neg|, thresholds swept over
/// the sorted union of scores. DataError when either class is absent.
double ks_statistic(const std::vector<double>& scores, const std::vector<int>& labels);

/// Information Value with quantile binning (ties merged) and +0.5 count
/// smoothing: sum_b (g_b - b_b) * ln(g_b / b_b), where g_b and b_b are the
/// bin's share of negatives and positives. Rank-based, so invariant under
/// strictly increasing score transforms.
double information_value(const std::vector<double>& scores, const std::vector<int>& labels,
                         std::size_t bins = 10);

struct PrPoint {
  double threshold = 0.0;
  double precision = 0.0;  // dollar-weighted
  double recall = 0.0;     // dollar-weighted
};

struct DollarPrCurve {
  std::vector<PrPoint> points;  // one per unique score, descending threshold
  double auc = 0.0;             // step-wise average-precision integration
};

/// Dollar-weighted precision-recall sweep. DataError when total fraud
/// dollars are zero.
DollarPrCurve dollar_pr_curve(const std::vector<double>& scores, const std::vector<int>& labels,
                              const std::vector<double>& amounts);

struct OperatingPoint {
  double threshold = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  bool target_met = false;
};

/// Among sweep points with precision >= target, the one maximizing recall;
/// falls back to the max-precision point flagged target_met=false.
OperatingPoint recall_at_precision(const DollarPrCurve& curve, double target_precision);
/// Among sweep points with recall >= target, the one maximizing precision;
/// falls back to the max-recall point flagged target_met=false.
OperatingPoint precision_at_recall(const DollarPrCurve& curve, double target_recall);

/// Full per-task metric set plus the JSON report document.
struct TaskMetrics {
  double ks = 0.0;
  double iv = 0.0;
  double dollar_pr_auc = 0.0;
  OperatingPoint r_at_p;
  double r_at_p_target = 0.25;
  OperatingPoint p_at_r;
  double p_at_r_target = 0.80;
};

TaskMetrics evaluate_task(const std::vector<double>& scores, const std::vector<int>& labels,
                          const std::vector<double>& amounts, double p_target = 0.25,
                          double r_target = 0.80);

std::string metrics_report_json(const std::vector<TaskMetrics>& per_task);

}  // namespace mtcnn
