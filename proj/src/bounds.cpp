#include "medianlab/bounds.hpp"

#include <cmath>
#include <stdexcept>

namespace medianlab {
namespace bounds {

namespace {

// x^e for x >= 0 via exp/log, guarded at x = 0.
double powg(double x, double e) {
  if (x == 0.0) return e == 0.0 ? 1.0 : 0.0;
  return std::exp(e * std::log(x));
}

// Left-hand side of the optimality equation for a*:
//   2*(1-1/q)*a + (1/q)*a^{(1-q)/q} - 2 + 1/q
double a_star_equation(double a, double q) {
  return 2.0 * (1.0 - 1.0 / q) * a + (1.0 / q) * powg(a, (1.0 - q) / q) - 2.0 + 1.0 / q;
}

double a_star_equation_deriv(double a, double q) {
  return 2.0 * (1.0 - 1.0 / q) +
         (1.0 / q) * ((1.0 - q) / q) * powg(a, (1.0 - 2.0 * q) / q);
}

}  // namespace

RelaxedProblem RelaxedProblem::make(const NormOrder& q, double lambda) {
  if (!q.has_conjugates()) throw std::invalid_argument("RelaxedProblem: need finite q > 1");
  if (!(lambda > 0.0 && lambda < 1.0))
    throw std::invalid_argument("RelaxedProblem: lambda must be in (0,1)");
  RelaxedProblem rp;
  rp.q = q.q();
  rp.lambda = lambda;
  rp.delta = powg(powg(lambda, -q.qq1()) - 1.0, q.q1q());
  double w = powg(rp.delta, -rp.q / (2.0 * rp.q - 1.0));
  rp.z = w / (w + 1.0);
  return rp;
}

double u_func(double a, const RelaxedProblem& rp) {
  return rp.delta * powg(1.0 - a, 1.0 / rp.q) - powg(a, 1.0 / rp.q) - 1.0 + 2.0 * a;
}

double u_prime(double a, const RelaxedProblem& rp) {
  double e = (1.0 - rp.q) / rp.q;
  return (1.0 / rp.q) * (-rp.delta * powg(1.0 - a, e) - powg(a, e)) + 2.0;
}

double h_func(double x, const RelaxedProblem& rp) {
  return rp.lambda * (rp.delta * powg(1.0 - x, 1.0 / rp.q) - powg(x, 1.0 / rp.q));
}

double solve_a_star(const NormOrder& qo) {
  if (!qo.has_conjugates())
    throw std::invalid_argument("solve_a_star: need finite q > 1");
  const double q = qo.q();
  // The equation goes from +infinity at a -> 0+ to a nonpositive value
  // at a = 1/2; bisect on the sign change, then polish with Newton
  // inside the bracket.
  double lo = 1e-300, hi = 0.5;
  if (a_star_equation(hi, q) > 0.0)
    throw std::runtime_error("solve_a_star: no sign change on (0, 1/2]");
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    if (a_star_equation(mid, q) > 0.0)
      lo = mid;
    else
      hi = mid;
  }
  double a = 0.5 * (lo + hi);
  for (int it = 0; it < 50; ++it) {
    double f = a_star_equation(a, q);
    if (std::fabs(f) <= 1e-13) break;
    double step = f / a_star_equation_deriv(a, q);
    double next = a - step;
    if (!(next > lo && next < hi)) break;  // keep the bisection bracket
    a = next;
  }
  return a;
}

BoundSolution ub(const NormOrder& q) {
  BoundSolution sol;
  sol.q = q;
  if (q.is_inf()) {
    // Limit of the finite-q pipeline: a* -> 0, delta* -> 2,
    // lambda* -> 1/(1+delta*) = 1/3.
    sol.a_star = 0.0;
    sol.delta_star = 2.0;
    sol.lambda_star = 1.0 / 3.0;
    sol.ub = 3.0;
    return sol;
  }
  if (q.is_one()) {
    // The optimality equation degenerates to an identity at q = 1; the
    // median is exactly optimal in L_1.
    sol.a_star = 0.0;
    sol.delta_star = 1.0;
    sol.lambda_star = 1.0;
    sol.ub = 1.0;
    return sol;
  }
  const double qq = q.q();
  sol.a_star = solve_a_star(q);
  sol.delta_star = (powg(sol.a_star, 1.0 / qq) + 1.0 - 2.0 * sol.a_star) /
                   powg(1.0 - sol.a_star, 1.0 / qq);
  sol.lambda_star = powg(1.0 + powg(sol.delta_star, q.qq1()), -q.q1q());
  sol.ub = 1.0 / sol.lambda_star;

  RelaxedProblem rp;
  rp.q = qq;
  rp.lambda = sol.lambda_star;
  rp.delta = sol.delta_star;
  rp.z = 0.0;  // unused for residuals
  sol.residual_u = u_func(sol.a_star, rp);
  sol.residual_uprime = u_prime(sol.a_star, rp);
  return sol;
}

double c_star(const NormOrder& q) {
  if (!q.has_conjugates()) throw std::invalid_argument("c_star: need finite q > 1");
  BoundSolution sol = ub(q);
  double lam_pow = powg(sol.lambda_star, q.qq1());
  double t = powg((1.0 - sol.a_star) / sol.a_star * lam_pow / (1.0 - lam_pow),
                  1.0 / q.q());
  return t / (1.0 + t);
}

LBParams lb_params(const NormOrder& q) {
  BoundSolution sol = ub(q);
  LBParams p;
  p.q = q.q();
  p.a_star = sol.a_star;
  p.c_star = c_star(q);
  p.type1_coord = 1.0 / (1.0 - p.c_star);
  p.frac_type1 = 1.0 / (2.0 - 2.0 * p.a_star);
  p.frac_type2 = (1.0 - 2.0 * p.a_star) / (2.0 - 2.0 * p.a_star);
  return p;
}

double lb_ratio(const NormOrder& q, long d) {
  if (d < 1) throw std::invalid_argument("lb_ratio: d must be >= 1");
  if (q.is_inf()) return 3.0 - 1.0 / static_cast<double>(d);
  if (q.is_one()) return 1.0;
  LBParams p = lb_params(q);
  double k = std::floor(p.a_star * static_cast<double>(d));
  if (k < 1.0)
    throw std::invalid_argument("lb_ratio: dimension too small, floor(a*d) = 0");
  double dd = static_cast<double>(d);
  double num = p.type1_coord * powg(k, 1.0 / p.q) + powg(dd, 1.0 / p.q) * (1.0 - 2.0 * p.a_star);
  double den = powg(powg(p.c_star / (1.0 - p.c_star), p.q) * k + (dd - k), 1.0 / p.q);
  return num / den;
}

double consistency_bound(double c) {
  if (!(c >= 0.0 && c < 1.0)) throw std::invalid_argument("consistency_bound: c in [0,1)");
  if (c < 0.5) {
    double s = std::sqrt(2.0 * c + 3.0);
    return std::sqrt(4.0 * s * c + 6.0 * s - 10.0 * c - 8.0) / (c + 1.0);
  }
  return std::sqrt(2.0 / (c + 1.0));
}

double robustness_bound(double c) {
  if (!(c >= 0.0 && c < 1.0)) throw std::invalid_argument("robustness_bound: c in [0,1)");
  double s = std::sqrt(3.0 - 2.0 * c);
  return std::sqrt(-4.0 * s * c + 6.0 * s + 10.0 * c - 8.0) / (1.0 - c);
}

PredictionBounds prediction_bounds(double c) {
  PredictionBounds pb;
  pb.c = c;
  pb.a1 = c < 0.5 ? (2.0 + c - std::sqrt(3.0 + 2.0 * c)) / 2.0 : (1.0 - c) / 2.0;
  pb.consistency = consistency_bound(c);
  pb.a2 = (2.0 - c - std::sqrt(3.0 - 2.0 * c)) / 2.0;
  pb.robustness = robustness_bound(c);
  double denom = std::sqrt(c * c + 1.0);
  if (c < 0.5) {
    double s = std::sqrt(2.0 * c + 3.0);
    pb.r_a = std::sqrt(2.0 * s * c + 3.0 * s - 5.0 * c - 4.0) / denom;
  } else {
    pb.r_a = std::sqrt(c + 1.0) / denom;
  }
  double s = std::sqrt(3.0 - 2.0 * c);
  pb.r_b = std::sqrt(-2.0 * s * c + 3.0 * s + 5.0 * c - 4.0) / denom;
  return pb;
}

std::vector<PredictionBounds> comparison_curves(const std::vector<double>& c_grid) {
  std::vector<PredictionBounds> out;
  out.reserve(c_grid.size());
  for (double c : c_grid) out.push_back(prediction_bounds(c));
  return out;
}

}  // namespace bounds
}  // namespace medianlab
