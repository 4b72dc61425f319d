#pragma once

#include <string>

#include "medianlab/mechanisms.hpp"
#include "medianlab/norms.hpp"

namespace medianlab {
namespace instances {

enum class GeneratorKind { kLbGeneral, kLbLinf, kRandom };
enum class Distribution { kUniformCube, kGaussian };

struct GeneratorSpec {
  GeneratorKind kind = GeneratorKind::kRandom;
  NormOrder q = NormOrder::finite(2.0);
  long d = 1;
  long n = 1;
  long seed = 0;
  Distribution distribution = Distribution::kUniformCube;
};

// Lower-bound family for finite q > 1: Type I points have
// floor(a*(q)*d) coordinates at 1/(1-c*(q)) (spread in a balanced
// round-robin over a seeded coordinate permutation) and zeros
// elsewhere; Type II points sit at the all-ones optimum. The
// coordinate-wise median (LOWER) of the result is validated to be the
// origin at build time.
Instance gen_lb_instance(const NormOrder& q, long d, long n, long seed);

// L_inf lower-bound family. Emitted as a weighted instance: d spike
// points 2*e_j plus one all-ones point, with counts chosen so each
// coordinate has exactly half the total mass strictly positive (the
// largest fraction for which the origin is still the LOWER median).
// n is rounded up so all counts are integral; meta records it.
Instance gen_linf_instance(long d, long n, long seed);

Instance gen_random_instance(const GeneratorSpec& spec);

Instance generate(const GeneratorSpec& spec);

// JSON persistence, schema {version:"1", d, n, points, weights?, meta}.
// Decimal encoding uses shortest round-trip doubles; hexfloat encodes
// coordinates as C hex-float strings for bit-exact cross-tool moves.
void save_instance(const Instance& inst, const std::string& path, bool hexfloat = false);
Instance load_instance(const std::string& path);

}  // namespace instances
}  // namespace medianlab
