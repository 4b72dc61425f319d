#pragma once

#include <vector>

#include "medianlab/norms.hpp"

namespace medianlab {
namespace bounds {

// Parameters of the relaxed one-dimensional program for a finite q > 1
// and a candidate lambda in (0,1):
//   delta = (lambda^{-q/(q-1)} - 1)^{(q-1)/q}
//   z     = delta^{-q/(2q-1)} / (delta^{-q/(2q-1)} + 1)  <= 1/2
// h is convex on [0,z] and concave on [z,1].
struct RelaxedProblem {
  double q;
  double lambda;
  double delta;
  double z;

  static RelaxedProblem make(const NormOrder& q, double lambda);
};

// u(a) = delta*(1-a)^{1/q} - a^{1/q} - 1 + 2a
double u_func(double a, const RelaxedProblem& rp);
// u'(a) = (1/q)*(-delta*(1-a)^{(1-q)/q} - a^{(1-q)/q}) + 2
double u_prime(double a, const RelaxedProblem& rp);
// h(x) = lambda*(delta*(1-x)^{1/q} - x^{1/q})
double h_func(double x, const RelaxedProblem& rp);

// Unique root in (0, 1/2) of
//   2*(1-1/q)*a + (1/q)*a^{(1-q)/q} - 2 + 1/q = 0
// for finite q > 1. Bracketed bisection refined by guarded Newton.
double solve_a_star(const NormOrder& q);

struct BoundSolution {
  NormOrder q = NormOrder::finite(2.0);
  double a_star = 0.0;
  double delta_star = 0.0;
  double lambda_star = 0.0;
  double ub = 1.0;
  double residual_u = 0.0;       // u(a*) at (a*, delta*)
  double residual_uprime = 0.0;  // u'(a*) at (a*, delta*)
};

// Worst-case approximation-ratio upper bound of the coordinate-wise
// median in L_q(R^d), independent of d. Hard-coded limits: ub(1) = 1
// and ub(inf) = 3.
BoundSolution ub(const NormOrder& q);

// Coordinate value parameter of the matching lower-bound instances.
double c_star(const NormOrder& q);

struct LBParams {
  double q;
  double a_star;
  double c_star;
  double type1_coord;  // 1/(1-c*)
  double frac_type1;   // 1/(2-2a*)
  double frac_type2;   // (1-2a*)/(2-2a*)
};

LBParams lb_params(const NormOrder& q);

// Closed-form predicted ratio of the lower-bound instance in dimension
// d. For q = inf returns 3 - 1/d. Requires floor(a*(q) * d) >= 1 for
// finite q.
double lb_ratio(const NormOrder& q, long d);

struct PredictionBounds {
  double c;
  double a1;
  double consistency;
  double a2;
  double robustness;
  double r_a;  // vs the known d=2 consistency guarantee
  double r_b;  // vs the known d=2 robustness guarantee
};

// Consistency guarantee of CMP(c) in L_2(R^d); branch point at c = 1/2.
double consistency_bound(double c);
// Robustness guarantee of CMP(c) in L_2(R^d).
double robustness_bound(double c);

PredictionBounds prediction_bounds(double c);
std::vector<PredictionBounds> comparison_curves(const std::vector<double>& c_grid);

}  // namespace bounds
}  // namespace medianlab
