#pragma once

#include <vector>

#include "medianlab/mechanisms.hpp"
#include "medianlab/norms.hpp"
#include "medianlab/optfac.hpp"

namespace medianlab {
namespace verify {

struct CertificateReport {
  double q = 2.0;
  double lambda = 0.0;
  double min_u = 0.0;
  double argmin_a = 0.0;
  bool pass = false;
};

// Evaluates u(a) on a dense grid over [0, z] with a Newton polish at
// the grid minimum. min >= 0 certifies 1/lambda as a valid
// approximation ratio; at lambda*(q) the minimum is a tangency at a*.
CertificateReport certificate_check(const NormOrder& q, double lambda,
                                    int grid_size = 2000);

struct SpConfig {
  int trials = 10000;
  long seed = 1;
  std::vector<long> dims = {1, 2, 3, 4, 5};
  std::vector<long> sizes = {1, 2, 3, 4, 5, 6, 7};
};

// Counts randomized unilateral deviations that strictly lower the
// deviating agent's cost (below -1e-9). Zero for truthful mechanisms.
long strategyproofness_suite(const Mechanism& mech, const SpConfig& cfg,
                             const NormOrder& q);

struct SearchResult {
  Instance best_instance;
  double best_ratio = 0.0;
  int restarts_used = 0;
  NormOrder q = NormOrder::finite(2.0);
  long d = 0;
};

// Local search over instances with the locally-optimal structure: spike
// points with a shared positive coordinate value v on balanced
// coordinate sets, plus points at the all-ones optimum, under the exact
// per-coordinate sign-balance constraint (zeros signed negative).
// Every reported ratio is re-scored by a fresh solver run.
SearchResult adversarial_search(const NormOrder& q, long d, long n, int restarts,
                                long seed);

struct LbSweepRow {
  long d = 0;
  double predicted_lb = 0.0;
  double empirical_lb = 0.0;  // NaN when the instance was not built
  double ub = 0.0;
};

// Per dimension: closed-form predicted ratio, the built instance's
// measured ratio, and ub(q). Set build_instances=false for a
// formula-only sweep (large d).
std::vector<LbSweepRow> lb_sweep(const NormOrder& q, const std::vector<long>& d_list,
                                 long n = 10000, long seed = 1,
                                 bool build_instances = true);

}  // namespace verify
}  // namespace medianlab
