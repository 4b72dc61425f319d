#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "medianlab/norms.hpp"

namespace medianlab {

// Which middle order statistic the median selects for even totals.
// The same rule is applied to every coordinate of one invocation.
enum class TieBreak { kLower, kUpper };

struct InstanceMeta {
  std::string generator;                  // "lb", "linf", "random", "" ...
  std::map<std::string, double> params;   // generator parameters
  long seed = 0;
};

struct Instance {
  std::vector<Point> points;
  std::vector<double> weights;  // empty = unweighted (all 1)
  InstanceMeta meta;

  std::size_t n() const { return points.size(); }
  std::size_t dim() const { return points.empty() ? 0 : points.front().size(); }
  bool weighted() const { return !weights.empty(); }
  double weight(std::size_t i) const { return weights.empty() ? 1.0 : weights[i]; }
  double total_weight() const;

  // n >= 1, uniform dimension, finite coordinates, positive weights.
  void validate() const;
};

// Weighted median of (value, weight) pairs. LOWER: smallest v with
// cumulative weight(<= v) >= W/2; UPPER: the symmetric upper variant.
double weighted_median(std::vector<std::pair<double, double>>& vw, TieBreak tb);

Point coordinate_median(const Instance& inst, TieBreak tb = TieBreak::kLower);

// Generalized median with prediction mass: appends the predicted point
// with weight c * (total weight of P) and takes the coordinate-wise
// median. At c = 0 this is exactly coordinate_median(P, tb).
Point cmp_median(const Instance& inst, const Point& prediction, double c,
                 TieBreak tb = TieBreak::kLower);

using Mechanism = std::function<Point(const Instance&)>;

Mechanism median_mechanism(TieBreak tb = TieBreak::kLower);
Mechanism cmp_mechanism(const Point& prediction, double c,
                        TieBreak tb = TieBreak::kLower);
// Coordinate-wise mean; manipulable on purpose, used as a harness self-test.
Mechanism mean_mechanism();

// cost_i(mech(P with p_i := report), p_i) - cost_i(mech(P), p_i).
// Nonnegative for every strategy-proof mechanism.
double deviation_cost_delta(const Instance& inst, std::size_t i,
                            const Point& report, const Mechanism& mech,
                            const NormOrder& q);

}  // namespace medianlab
