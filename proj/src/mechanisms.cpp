#include "medianlab/mechanisms.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace medianlab {

double Instance::total_weight() const {
  if (weights.empty()) return static_cast<double>(points.size());
  detail::KahanSum s;
  for (double w : weights) s.add(w);
  return s.value();
}

void Instance::validate() const {
  if (points.empty()) throw std::invalid_argument("Instance: empty");
  std::size_t d = points.front().size();
  if (d == 0) throw std::invalid_argument("Instance: zero-dimensional point");
  for (const Point& p : points) {
    if (p.size() != d) throw std::invalid_argument("Instance: ragged dimensions");
    for (double v : p) {
      if (!std::isfinite(v)) throw std::invalid_argument("Instance: non-finite coordinate");
    }
  }
  if (!weights.empty()) {
    if (weights.size() != points.size())
      throw std::invalid_argument("Instance: weights length mismatch");
    for (double w : weights) {
      if (!(w > 0.0) || !std::isfinite(w))
        throw std::invalid_argument("Instance: weights must be positive and finite");
    }
  }
}

double weighted_median(std::vector<std::pair<double, double>>& vw, TieBreak tb) {
  if (vw.empty()) throw std::invalid_argument("weighted_median: empty");
  std::sort(vw.begin(), vw.end());
  double total = 0.0;
  for (auto& [v, w] : vw) total += w;
  const double half = total / 2.0;
  // Relative slack so that integer-weight ties are decided exactly.
  const double eps = 1e-12 * total;
  if (tb == TieBreak::kLower) {
    double cum = 0.0;
    for (auto& [v, w] : vw) {
      cum += w;
      if (cum >= half - eps) return v;
    }
  } else {
    double cum = 0.0;
    for (auto it = vw.rbegin(); it != vw.rend(); ++it) {
      cum += it->second;
      if (cum >= half - eps) return it->first;
    }
  }
  return vw.back().first;  // unreachable
}

Point coordinate_median(const Instance& inst, TieBreak tb) {
  inst.validate();
  const std::size_t d = inst.dim();
  Point m(d);
  std::vector<std::pair<double, double>> vw(inst.n());
  for (std::size_t j = 0; j < d; ++j) {
    for (std::size_t i = 0; i < inst.n(); ++i)
      vw[i] = {inst.points[i][j], inst.weight(i)};
    m[j] = weighted_median(vw, tb);
  }
  return m;
}

Point cmp_median(const Instance& inst, const Point& prediction, double c, TieBreak tb) {
  inst.validate();
  if (prediction.size() != inst.dim())
    throw std::invalid_argument("cmp_median: prediction dimension mismatch");
  if (!(c >= 0.0 && c < 1.0)) throw std::invalid_argument("cmp_median: c must be in [0,1)");
  if (c == 0.0) return coordinate_median(inst, tb);
  Instance aug = inst;
  if (aug.weights.empty()) aug.weights.assign(aug.n(), 1.0);
  aug.points.push_back(prediction);
  aug.weights.push_back(c * inst.total_weight());
  return coordinate_median(aug, tb);
}

Mechanism median_mechanism(TieBreak tb) {
  return [tb](const Instance& inst) { return coordinate_median(inst, tb); };
}

Mechanism cmp_mechanism(const Point& prediction, double c, TieBreak tb) {
  return [prediction, c, tb](const Instance& inst) {
    return cmp_median(inst, prediction, c, tb);
  };
}

Mechanism mean_mechanism() {
  return [](const Instance& inst) {
    inst.validate();
    Point m(inst.dim(), 0.0);
    double total = inst.total_weight();
    for (std::size_t i = 0; i < inst.n(); ++i)
      for (std::size_t j = 0; j < inst.dim(); ++j)
        m[j] += inst.weight(i) * inst.points[i][j];
    for (double& v : m) v /= total;
    return m;
  };
}

double deviation_cost_delta(const Instance& inst, std::size_t i, const Point& report,
                            const Mechanism& mech, const NormOrder& q) {
  if (i >= inst.n()) throw std::out_of_range("deviation_cost_delta: index");
  if (report.size() != inst.dim())
    throw std::invalid_argument("deviation_cost_delta: report dimension mismatch");
  const Point truth = inst.points[i];
  double truthful_cost = lq_dist(mech(inst), truth, q);
  Instance deviated = inst;
  deviated.points[i] = report;
  double deviated_cost = lq_dist(mech(deviated), truth, q);
  return deviated_cost - truthful_cost;
}

}  // namespace medianlab
