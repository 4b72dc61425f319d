#pragma once

#include "medianlab/mechanisms.hpp"
#include "medianlab/norms.hpp"

namespace medianlab {
namespace optfac {

struct SolverConfig {
  int max_iters = 2000;
  double grad_tol = 1e-8;
  int restarts = 5;
  double smoothing_eps = 0.0;  // 0 = auto: 1e-9 * instance diameter
  long seed = 0;
};

struct OptResult {
  Point point;
  double cost = 0.0;
  bool converged = true;
};

// argmin_f sum_i w_i * ||f - p_i||_q. Exact shortcuts: q = 1 and d = 1
// reduce to the (coordinate-wise) median. Otherwise multi-start local
// minimization of the convex objective; every input point and the
// coordinate median are always scanned as candidates, so the returned
// cost never exceeds the best of those.
OptResult optimal_facility(const Instance& inst, const NormOrder& q,
                           const SolverConfig& cfg = {});

// Exhaustive evaluation on an axis-aligned grid, d <= 4. Grid points
// are lo + i*resolution (hi included), so halving the resolution never
// increases the returned cost.
OptResult grid_oracle(const Instance& inst, const NormOrder& q, const Point& lo,
                      const Point& hi, double resolution);

struct EvalReport {
  Point mechanism_point;
  Point optimal_point;
  double sc_mechanism = 0.0;
  double sc_optimal = 0.0;
  double empirical_ratio = 1.0;
  double theoretical_ub = 0.0;
  NormOrder q = NormOrder::finite(2.0);
  bool solver_converged = true;
};

EvalReport empirical_ratio(const Instance& inst, const NormOrder& q,
                           const SolverConfig& cfg = {},
                           TieBreak tb = TieBreak::kLower);

// Same report for an arbitrary mechanism point (used for CMP(c)).
EvalReport evaluate_point(const Instance& inst, const Point& mech_point,
                          const NormOrder& q, const SolverConfig& cfg = {});

}  // namespace optfac
}  // namespace medianlab
