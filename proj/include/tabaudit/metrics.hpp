#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

namespace tabaudit {

struct RocPoint {
  double fpr = 0.0;
  double tpr = 0.0;
};

// Threshold sweep over the distinct scores with the decision rule
// "score > threshold => member", plus a below-minimum sentinel. The first
// point is (0,0), the last (1,1); fpr and tpr are non-decreasing.
struct RocCurve {
  std::vector<RocPoint> points;
};

struct AttackReport {
  double auc_roc = 0.0;
  double tpr_at_fpr = 0.0;
  double fpr_cap = 0.10;
  std::size_t n_members = 0;
  std::size_t n_non_members = 0;
};

// labels are 0 (non-member) / 1 (member); both classes must be present.
RocCurve roc_curve(std::span<const double> scores, std::span<const int> labels);

// Mann-Whitney statistic: (wins + 0.5 * ties) / (n1 * n0).
double auc(std::span<const double> scores, std::span<const int> labels);

// Maximum tpr over thresholds whose fpr does not exceed cap. Step function,
// no interpolation between curve points.
double tpr_at_fpr(std::span<const double> scores, std::span<const int> labels,
                  double cap);

AttackReport make_attack_report(std::span<const double> scores,
                                std::span<const int> labels, double fpr_cap);

nlohmann::json report_to_json(const AttackReport& report);
void write_metrics_json(const std::string& path, const AttackReport& report);
void write_roc_csv(const std::string& path, const RocCurve& curve);
// Minimal standalone plot with a zoomed low-FPR inset.
void write_roc_svg(const std::string& path, const RocCurve& curve,
                   const std::string& title);

}  // namespace tabaudit
