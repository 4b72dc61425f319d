#include "medianlab/optfac.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "medianlab/bounds.hpp"

namespace medianlab {
namespace optfac {

namespace {

double bounding_box_diameter(const Instance& inst, const NormOrder& q) {
  const std::size_t d = inst.dim();
  Point lo = inst.points.front(), hi = inst.points.front();
  for (const Point& p : inst.points)
    for (std::size_t j = 0; j < d; ++j) {
      lo[j] = std::min(lo[j], p[j]);
      hi[j] = std::max(hi[j], p[j]);
    }
  Point diag(d);
  for (std::size_t j = 0; j < d; ++j) diag[j] = hi[j] - lo[j];
  return lq_norm(diag, q);
}

// Gradient of sum_i w_i * ||f - p_i||_q for finite q > 1, with distance
// terms below eps damped toward the smooth quadratic cap.
void gradient(const Instance& inst, const NormOrder& q, const Point& f, double eps,
              Point& grad) {
  const std::size_t d = f.size();
  const double qq = q.q();
  std::fill(grad.begin(), grad.end(), 0.0);
  Point r(d);
  for (std::size_t i = 0; i < inst.n(); ++i) {
    const Point& p = inst.points[i];
    for (std::size_t j = 0; j < d; ++j) r[j] = f[j] - p[j];
    double dist = lq_norm(r, q);
    if (dist == 0.0) continue;
    double damp = dist < eps ? dist / eps : 1.0;
    double w = inst.weight(i) * damp;
    double denom = pow_abs(std::max(dist, eps * 1e-3), qq - 1.0);
    for (std::size_t j = 0; j < d; ++j) {
      double g = pow_abs(r[j], qq - 1.0) / denom;
      grad[j] += w * (r[j] < 0.0 ? -g : g);
    }
  }
}

// One damped Weiszfeld pass for q = 2 (weighted geometric median).
bool weiszfeld_step(const Instance& inst, const Point& f, double eps, Point& next) {
  const std::size_t d = f.size();
  std::fill(next.begin(), next.end(), 0.0);
  double wsum = 0.0;
  for (std::size_t i = 0; i < inst.n(); ++i) {
    const Point& p = inst.points[i];
    double dist2 = 0.0;
    for (std::size_t j = 0; j < d; ++j) dist2 += (f[j] - p[j]) * (f[j] - p[j]);
    double dist = std::max(std::sqrt(dist2), eps);
    double u = inst.weight(i) / dist;
    wsum += u;
    for (std::size_t j = 0; j < d; ++j) next[j] += u * p[j];
  }
  if (wsum == 0.0) return false;
  for (std::size_t j = 0; j < d; ++j) next[j] /= wsum;
  return true;
}

OptResult descend_finite_q(const Instance& inst, const NormOrder& q, Point f,
                           const SolverConfig& cfg, double eps, double scale) {
  const std::size_t d = f.size();
  double cost = social_cost(inst, f, q);
  bool converged = false;
  if (q.q() == 2.0) {
    Point next(d);
    for (int it = 0; it < cfg.max_iters; ++it) {
      if (!weiszfeld_step(inst, f, eps, next)) break;
      double ncost = social_cost(inst, next, q);
      double step = lq_dist(f, next, q);
      if (ncost <= cost) {
        f = next;
        cost = ncost;
      }
      if (step <= std::max(cfg.grad_tol, 1e-14) * std::max(scale, 1.0)) {
        converged = true;
        break;
      }
    }
    return {f, cost, converged};
  }
  Point grad(d), trial(d);
  double step = 0.1 * std::max(scale, 1e-12);
  for (int it = 0; it < cfg.max_iters; ++it) {
    gradient(inst, q, f, eps, grad);
    double gnorm = lq_norm(grad, NormOrder::finite(2.0));
    if (gnorm <= cfg.grad_tol * std::max(1.0, inst.total_weight())) {
      converged = true;
      break;
    }
    bool improved = false;
    for (int ls = 0; ls < 40; ++ls) {
      for (std::size_t j = 0; j < d; ++j) trial[j] = f[j] - step * grad[j] / gnorm;
      double tcost = social_cost(inst, trial, q);
      if (tcost < cost - 1e-16 * (1.0 + cost)) {
        f = trial;
        cost = tcost;
        improved = true;
        step *= 1.5;
        break;
      }
      step *= 0.5;
    }
    if (!improved) {
      converged = step <= 1e-14 * std::max(scale, 1.0);
      break;
    }
  }
  return {f, cost, converged};
}

// Exact 1-D minimization of sum_i w_i * max(c_i, |t - p_i|) over the
// breakpoints of the piecewise-linear objective.
double minimize_linf_coordinate(const std::vector<double>& p, const std::vector<double>& c,
                                const std::vector<double>& w, double t0) {
  std::vector<double> cand;
  cand.reserve(2 * p.size() + 1);
  cand.push_back(t0);
  for (std::size_t i = 0; i < p.size(); ++i) {
    cand.push_back(p[i] - c[i]);
    cand.push_back(p[i] + c[i]);
  }
  double best_t = t0, best_v = std::numeric_limits<double>::infinity();
  for (double t : cand) {
    double v = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i)
      v += w[i] * std::max(c[i], std::fabs(t - p[i]));
    if (v < best_v) {
      best_v = v;
      best_t = t;
    }
  }
  return best_t;
}

OptResult descend_linf(const Instance& inst, Point f, const SolverConfig& cfg) {
  const NormOrder q = NormOrder::infinity();
  const std::size_t d = f.size();
  const std::size_t n = inst.n();
  std::vector<double> pj(n), cj(n), w(n);
  for (std::size_t i = 0; i < n; ++i) w[i] = inst.weight(i);
  double cost = social_cost(inst, f, q);
  bool converged = false;
  int sweeps = std::max(4, cfg.max_iters / 50);
  for (int sweep = 0; sweep < sweeps; ++sweep) {
    double before = cost;
    for (std::size_t j = 0; j < d; ++j) {
      for (std::size_t i = 0; i < n; ++i) {
        const Point& p = inst.points[i];
        double m = 0.0;
        for (std::size_t k = 0; k < d; ++k)
          if (k != j) m = std::max(m, std::fabs(f[k] - p[k]));
        pj[i] = p[j];
        cj[i] = m;
      }
      f[j] = minimize_linf_coordinate(pj, cj, w, f[j]);
    }
    cost = social_cost(inst, f, q);
    if (before - cost <= 1e-15 * (1.0 + before)) {
      converged = true;
      break;
    }
  }
  return {f, cost, converged};
}

}  // namespace

OptResult optimal_facility(const Instance& inst, const NormOrder& q,
                           const SolverConfig& cfg) {
  inst.validate();
  const std::size_t d = inst.dim();

  // Exact shortcuts: L_1 in any dimension and any norm in d = 1.
  if (q.is_one() || d == 1) {
    Point m = coordinate_median(inst, TieBreak::kLower);
    return {m, social_cost(inst, m, q), true};
  }

  double scale = bounding_box_diameter(inst, q);
  if (scale == 0.0) {
    // All points coincide.
    return {inst.points.front(), 0.0, true};
  }
  double eps = cfg.smoothing_eps > 0.0 ? cfg.smoothing_eps : 1e-9 * scale;

  // Candidate scan: inputs and the coordinate median. The optimum of a
  // convex sum of norms lies in the convex hull, so restarts are drawn
  // from random convex combinations of input points.
  OptResult best;
  best.cost = std::numeric_limits<double>::infinity();
  best.converged = true;
  auto consider = [&](const Point& f) {
    double c = social_cost(inst, f, q);
    if (c < best.cost) {
      best.cost = c;
      best.point = f;
    }
  };
  for (const Point& p : inst.points) consider(p);
  consider(coordinate_median(inst, TieBreak::kLower));

  std::mt19937_64 rng(static_cast<unsigned long long>(cfg.seed));
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> pick(0, inst.n() - 1);

  bool all_converged = true;
  for (int r = 0; r < std::max(1, cfg.restarts); ++r) {
    Point start;
    if (r == 0) {
      start = best.point;
    } else {
      const Point& a = inst.points[pick(rng)];
      const Point& b = inst.points[pick(rng)];
      double t = unif(rng);
      start.resize(d);
      for (std::size_t j = 0; j < d; ++j) start[j] = t * a[j] + (1.0 - t) * b[j];
    }
    OptResult run = q.is_inf() ? descend_linf(inst, start, cfg)
                               : descend_finite_q(inst, q, start, cfg, eps, scale);
    all_converged = all_converged && run.converged;
    if (run.cost < best.cost) {
      best.cost = run.cost;
      best.point = run.point;
    }
  }
  best.converged = all_converged;
  return best;
}

OptResult grid_oracle(const Instance& inst, const NormOrder& q, const Point& lo,
                      const Point& hi, double resolution) {
  inst.validate();
  const std::size_t d = inst.dim();
  if (d > 4) throw std::invalid_argument("grid_oracle: d must be <= 4");
  if (lo.size() != d || hi.size() != d)
    throw std::invalid_argument("grid_oracle: bounds dimension mismatch");
  if (!(resolution > 0.0)) throw std::invalid_argument("grid_oracle: resolution must be > 0");
  std::vector<std::vector<double>> axes(d);
  for (std::size_t j = 0; j < d; ++j) {
    if (!(lo[j] < hi[j])) throw std::invalid_argument("grid_oracle: need lo < hi");
    for (double v = lo[j]; v < hi[j] + 1e-12 * resolution; v += resolution)
      axes[j].push_back(v);
    if (axes[j].back() < hi[j] - 1e-12) axes[j].push_back(hi[j]);
  }
  std::vector<std::size_t> idx(d, 0);
  Point f(d);
  OptResult best;
  best.cost = std::numeric_limits<double>::infinity();
  while (true) {
    for (std::size_t j = 0; j < d; ++j) f[j] = axes[j][idx[j]];
    double c = social_cost(inst, f, q);
    if (c < best.cost) {
      best.cost = c;
      best.point = f;
    }
    std::size_t j = 0;
    while (j < d && ++idx[j] == axes[j].size()) idx[j++] = 0;
    if (j == d) break;
  }
  return best;
}

EvalReport evaluate_point(const Instance& inst, const Point& mech_point,
                          const NormOrder& q, const SolverConfig& cfg) {
  EvalReport rep;
  rep.q = q;
  rep.mechanism_point = mech_point;
  rep.sc_mechanism = social_cost(inst, mech_point, q);
  OptResult opt = optimal_facility(inst, q, cfg);
  // The mechanism point is a legal candidate too.
  if (rep.sc_mechanism < opt.cost) {
    opt.cost = rep.sc_mechanism;
    opt.point = mech_point;
  }
  rep.optimal_point = opt.point;
  rep.sc_optimal = opt.cost;
  rep.solver_converged = opt.converged;
  rep.theoretical_ub = bounds::ub(q).ub;
  if (rep.sc_optimal <= 1e-15 * (1.0 + rep.sc_mechanism)) {
    rep.empirical_ratio = 1.0;  // degenerate: median coincides with all points
  } else {
    rep.empirical_ratio = rep.sc_mechanism / rep.sc_optimal;
  }
  return rep;
}

EvalReport empirical_ratio(const Instance& inst, const NormOrder& q,
                           const SolverConfig& cfg, TieBreak tb) {
  return evaluate_point(inst, coordinate_median(inst, tb), q, cfg);
}

}  // namespace optfac
}  // namespace medianlab
