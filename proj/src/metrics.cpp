#include "tabaudit/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

#include "tabaudit/error.hpp"

namespace tabaudit {

namespace {

struct ClassCounts {
  std::size_t members = 0;
  std::size_t non_members = 0;
};

ClassCounts check_inputs(std::span<const double> scores,
                         std::span<const int> labels) {
  if (scores.size() != labels.size()) {
    throw Error("metrics: scores and labels differ in length");
  }
  ClassCounts counts;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == 1) {
      ++counts.members;
    } else if (labels[i] == 0) {
      ++counts.non_members;
    } else {
      throw Error("metrics: label must be 0 or 1");
    }
    if (!std::isfinite(scores[i])) {
      throw Error("metrics: non-finite score");
    }
  }
  if (counts.members == 0 || counts.non_members == 0) {
    throw Error("metrics: both classes must be present");
  }
  return counts;
}

}  // namespace

RocCurve roc_curve(std::span<const double> scores,
                   std::span<const int> labels) {
  const ClassCounts counts = check_inputs(scores, labels);
  const double n1 = static_cast<double>(counts.members);
  const double n0 = static_cast<double>(counts.non_members);

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (scores[a] != scores[b]) {
      return scores[a] > scores[b];
    }
    return a < b;
  });

  RocCurve curve;
  curve.points.reserve(scores.size() + 2);
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t i = 0;
  // One threshold per distinct score: the point counts samples strictly
  // above it, so the highest score contributes (0, 0).
  while (i < order.size()) {
    curve.points.push_back(
        {static_cast<double>(fp) / n0, static_cast<double>(tp) / n1});
    const double v = scores[order[i]];
    while (i < order.size() && scores[order[i]] == v) {
      if (labels[order[i]] == 1) {
        ++tp;
      } else {
        ++fp;
      }
      ++i;
    }
  }
  // Below-minimum sentinel: everything classified member.
  curve.points.push_back({1.0, 1.0});
  return curve;
}

double auc(std::span<const double> scores, std::span<const int> labels) {
  const ClassCounts counts = check_inputs(scores, labels);

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (scores[a] != scores[b]) {
      return scores[a] < scores[b];
    }
    return a < b;
  });

  // Rank-sum with midranks for ties; sums stay exact (integers and halves).
  double member_rank_sum = 0.0;
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) {
      ++j;
    }
    const double midrank = (static_cast<double>(i + 1) +
                            static_cast<double>(j)) / 2.0;
    for (std::size_t k = i; k < j; ++k) {
      if (labels[order[k]] == 1) {
        member_rank_sum += midrank;
      }
    }
    i = j;
  }
  const double n1 = static_cast<double>(counts.members);
  const double n0 = static_cast<double>(counts.non_members);
  const double u = member_rank_sum - n1 * (n1 + 1.0) / 2.0;
  return u / (n1 * n0);
}

double tpr_at_fpr(std::span<const double> scores, std::span<const int> labels,
                  double cap) {
  if (cap < 0.0 || cap > 1.0) {
    throw Error("metrics: fpr cap must lie in [0, 1]");
  }
  const RocCurve curve = roc_curve(scores, labels);
  double best = 0.0;
  for (const RocPoint& p : curve.points) {
    if (p.fpr <= cap) {
      best = std::max(best, p.tpr);
    }
  }
  return best;
}

AttackReport make_attack_report(std::span<const double> scores,
                                std::span<const int> labels, double fpr_cap) {
  const ClassCounts counts = check_inputs(scores, labels);
  AttackReport report;
  report.auc_roc = auc(scores, labels);
  report.tpr_at_fpr = tpr_at_fpr(scores, labels, fpr_cap);
  report.fpr_cap = fpr_cap;
  report.n_members = counts.members;
  report.n_non_members = counts.non_members;
  return report;
}

nlohmann::json report_to_json(const AttackReport& report) {
  return {{"auc_roc", report.auc_roc},
          {"tpr_at_fpr", report.tpr_at_fpr},
          {"fpr_cap", report.fpr_cap},
          {"n_members", report.n_members},
          {"n_non_members", report.n_non_members}};
}

void write_metrics_json(const std::string& path, const AttackReport& report) {
  std::ofstream out(path);
  if (!out) {
    throw Error("cannot write metrics file '" + path + "'");
  }
  out << report_to_json(report).dump(2) << '\n';
}

void write_roc_csv(const std::string& path, const RocCurve& curve) {
  std::ofstream out(path);
  if (!out) {
    throw Error("cannot write roc file '" + path + "'");
  }
  out << "fpr,tpr\n";
  char buf[64];
  for (const RocPoint& p : curve.points) {
    std::snprintf(buf, sizeof(buf), "%.6f,%.6f\n", p.fpr, p.tpr);
    out << buf;
  }
}

namespace {

// Map (fpr, tpr) into pixel coordinates of a plot box.
struct PlotBox {
  double x0, y0, w, h;   // pixel origin (top-left) and size
  double max_x = 1.0;    // data range [0, max_x] x [0, 1]

  double px(double fx) const { return x0 + w * (fx / max_x); }
  double py(double fy) const { return y0 + h * (1.0 - fy); }
};

void append_polyline(std::ostringstream& svg, const PlotBox& box,
                     const RocCurve& curve, const char* color) {
  svg << "  <polyline fill=\"none\" stroke=\"" << color
      << "\" stroke-width=\"1.5\" points=\"";
  for (const RocPoint& p : curve.points) {
    if (p.fpr > box.max_x) {
      continue;
    }
    svg << box.px(p.fpr) << ',' << box.py(p.tpr) << ' ';
  }
  svg << "\"/>\n";
}

void append_frame(std::ostringstream& svg, const PlotBox& box,
                  const std::string& label) {
  svg << "  <rect x=\"" << box.x0 << "\" y=\"" << box.y0 << "\" width=\""
      << box.w << "\" height=\"" << box.h
      << "\" fill=\"white\" stroke=\"#444\"/>\n";
  svg << "  <line x1=\"" << box.px(0) << "\" y1=\"" << box.py(0) << "\" x2=\""
      << box.px(box.max_x) << "\" y2=\"" << box.py(box.max_x)
      << "\" stroke=\"#bbb\" stroke-dasharray=\"4 3\"/>\n";
  svg << "  <text x=\"" << box.x0 + 4 << "\" y=\"" << box.y0 + 14
      << "\" font-size=\"11\" font-family=\"sans-serif\" fill=\"#333\">"
      << label << "</text>\n";
}

}  // namespace

void write_roc_svg(const std::string& path, const RocCurve& curve,
                   const std::string& title) {
  std::ofstream out(path);
  if (!out) {
    throw Error("cannot write svg file '" + path + "'");
  }
  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"480\" "
         "height=\"360\" viewBox=\"0 0 480 360\">\n";
  svg << "  <text x=\"24\" y=\"20\" font-size=\"13\" "
         "font-family=\"sans-serif\">" << title << "</text>\n";

  const PlotBox main{40, 32, 416, 296, 1.0};
  append_frame(svg, main, "fpr vs tpr");
  append_polyline(svg, main, curve, "#1f6fb2");

  // Inset zooming into the low-FPR region.
  const PlotBox inset{300, 220, 140, 96, 0.10};
  append_frame(svg, inset, "fpr <= 0.10");
  append_polyline(svg, inset, curve, "#b23a1f");

  svg << "</svg>\n";
  out << svg.str();
}

}  // namespace tabaudit
