#include "medianlab/instances.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <random>
#include <stdexcept>

#include "json.hpp"

#include "medianlab/bounds.hpp"

namespace medianlab {
namespace instances {

namespace {

using nlohmann::json;

bool median_is_origin(const Instance& inst) {
  Point m = coordinate_median(inst, TieBreak::kLower);
  for (double v : m)
    if (v != 0.0) return false;
  return true;
}

}  // namespace

Instance gen_lb_instance(const NormOrder& q, long d, long n, long seed) {
  if (!q.has_conjugates())
    throw std::invalid_argument("gen_lb_instance: need finite q > 1");
  if (d < 1 || n < 2) throw std::invalid_argument("gen_lb_instance: bad d or n");
  bounds::LBParams p = bounds::lb_params(q);
  long k = static_cast<long>(std::floor(p.a_star * static_cast<double>(d)));
  if (k < 1)
    throw std::invalid_argument("gen_lb_instance: floor(a*d) = 0, dimension too small");

  // floor(a*d) < a*d leaves slack, but rounding the type counts can
  // still push one coordinate past n/2 positives; bump the Type I
  // count until the origin is the LOWER median.
  long n_type1 = static_cast<long>(std::llround(static_cast<double>(n) * p.frac_type1));
  std::mt19937_64 rng(static_cast<unsigned long long>(seed));
  std::vector<long> coord_label(d);
  std::iota(coord_label.begin(), coord_label.end(), 0L);
  std::shuffle(coord_label.begin(), coord_label.end(), rng);

  for (int attempt = 0; attempt < 64; ++attempt, ++n_type1) {
    long n_type2 = n - n_type1;
    if (n_type1 < 1 || n_type2 < 0)
      throw std::invalid_argument("gen_lb_instance: n too small for the type counts");
    Instance inst;
    inst.points.reserve(n);
    for (long t = 0; t < n_type1; ++t) {
      Point pt(d, 0.0);
      // k consecutive slots mod d: per-coordinate spike counts differ
      // by at most one, which keeps the median at the origin.
      for (long r = 0; r < k; ++r)
        pt[coord_label[static_cast<std::size_t>((t * k + r) % d)]] = p.type1_coord;
      inst.points.push_back(std::move(pt));
    }
    for (long t = 0; t < n_type2; ++t) inst.points.emplace_back(d, 1.0);
    if (!median_is_origin(inst)) continue;
    inst.meta.generator = "lb";
    inst.meta.seed = seed;
    inst.meta.params = {{"q", q.q()},
                        {"d", static_cast<double>(d)},
                        {"n", static_cast<double>(n)},
                        {"k", static_cast<double>(k)},
                        {"n_type1", static_cast<double>(n_type1)},
                        {"rounding_error",
                         static_cast<double>(n_type1) - static_cast<double>(n) * p.frac_type1},
                        {"c_star", p.c_star},
                        {"a_star", p.a_star}};
    return inst;
  }
  throw std::runtime_error("gen_lb_instance: median validation failed");
}

Instance gen_linf_instance(long d, long n, long seed) {
  if (d < 1 || n < 2) throw std::invalid_argument("gen_linf_instance: bad d or n");
  Instance inst;
  inst.meta.generator = "linf";
  inst.meta.seed = seed;
  if (d == 1) {
    long half = (n + 1) / 2;
    inst.points = {Point{2.0}, Point{0.0}};
    inst.weights = {static_cast<double>(half), static_cast<double>(half)};
    inst.meta.params = {{"d", 1.0}, {"n", static_cast<double>(2 * half)}};
    return inst;
  }
  // Counts n_I = n*d/(2(d-1)) spikes and n_II = n*(d-2)/(2(d-1)) ones;
  // round n up so both are integers and spikes split evenly over d.
  long unit = 2 * d * (d - 1);
  long m = (n + unit - 1) / unit;
  long nn = m * unit;
  long n_type1 = nn * d / (2 * (d - 1));
  long n_type2 = nn - n_type1;
  double spike_w = static_cast<double>(n_type1) / static_cast<double>(d);
  for (long j = 0; j < d; ++j) {
    Point pt(d, 0.0);
    pt[j] = 2.0;
    inst.points.push_back(std::move(pt));
    inst.weights.push_back(spike_w);
  }
  if (n_type2 > 0) {
    inst.points.emplace_back(d, 1.0);
    inst.weights.push_back(static_cast<double>(n_type2));
  }
  if (!median_is_origin(inst))
    throw std::runtime_error("gen_linf_instance: median validation failed");
  inst.meta.params = {{"d", static_cast<double>(d)},
                      {"n", static_cast<double>(nn)},
                      {"n_requested", static_cast<double>(n)},
                      {"n_type1", static_cast<double>(n_type1)},
                      {"n_type2", static_cast<double>(n_type2)}};
  return inst;
}

Instance gen_random_instance(const GeneratorSpec& spec) {
  if (spec.d < 1 || spec.n < 1)
    throw std::invalid_argument("gen_random_instance: bad d or n");
  std::mt19937_64 rng(static_cast<unsigned long long>(spec.seed));
  Instance inst;
  inst.points.reserve(spec.n);
  if (spec.distribution == Distribution::kUniformCube) {
    std::uniform_real_distribution<double> dist(0.0, 1.0);
    for (long i = 0; i < spec.n; ++i) {
      Point pt(spec.d);
      for (double& v : pt) v = dist(rng);
      inst.points.push_back(std::move(pt));
    }
  } else {
    std::normal_distribution<double> dist(0.0, 1.0);
    for (long i = 0; i < spec.n; ++i) {
      Point pt(spec.d);
      for (double& v : pt) v = dist(rng);
      inst.points.push_back(std::move(pt));
    }
  }
  inst.meta.generator = "random";
  inst.meta.seed = spec.seed;
  inst.meta.params = {
      {"d", static_cast<double>(spec.d)},
      {"n", static_cast<double>(spec.n)},
      {"gaussian", spec.distribution == Distribution::kGaussian ? 1.0 : 0.0}};
  return inst;
}

Instance generate(const GeneratorSpec& spec) {
  switch (spec.kind) {
    case GeneratorKind::kLbGeneral:
      return gen_lb_instance(spec.q, spec.d, spec.n, spec.seed);
    case GeneratorKind::kLbLinf:
      return gen_linf_instance(spec.d, spec.n, spec.seed);
    case GeneratorKind::kRandom:
      return gen_random_instance(spec);
  }
  throw std::logic_error("generate: unknown kind");
}

void save_instance(const Instance& inst, const std::string& path, bool hexfloat) {
  inst.validate();
  json j;
  j["version"] = "1";
  j["d"] = inst.dim();
  j["n"] = inst.n();
  j["encoding"] = hexfloat ? "hexfloat" : "decimal";
  if (hexfloat) {
    auto hex = [](double v) {
      char buf[48];
      std::snprintf(buf, sizeof buf, "%a", v);
      return std::string(buf);
    };
    json pts = json::array();
    for (const Point& p : inst.points) {
      json row = json::array();
      for (double v : p) row.push_back(hex(v));
      pts.push_back(std::move(row));
    }
    j["points"] = std::move(pts);
  } else {
    j["points"] = inst.points;
  }
  if (!inst.weights.empty()) j["weights"] = inst.weights;
  j["meta"] = {{"generator", inst.meta.generator},
               {"params", inst.meta.params},
               {"seed", inst.meta.seed}};
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_instance: cannot open " + path);
  out << j.dump(1) << "\n";
  if (!out) throw std::runtime_error("save_instance: write failed for " + path);
}

Instance load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_instance: cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw std::runtime_error("load_instance: malformed JSON: " + std::string(e.what()));
  }
  if (!j.contains("version")) throw std::runtime_error("load_instance: missing version");
  if (j["version"] != "1")
    throw std::runtime_error("load_instance: unsupported version " + j["version"].dump());
  Instance inst;
  const std::size_t d = j.at("d").get<std::size_t>();
  bool hexfloat = j.value("encoding", "decimal") == std::string("hexfloat");
  for (const auto& row : j.at("points")) {
    Point p;
    for (const auto& v : row) {
      if (hexfloat)
        p.push_back(std::strtod(v.get<std::string>().c_str(), nullptr));
      else
        p.push_back(v.get<double>());
    }
    if (p.size() != d) throw std::runtime_error("load_instance: ragged row (dimension mismatch)");
    inst.points.push_back(std::move(p));
  }
  if (inst.points.size() != j.at("n").get<std::size_t>())
    throw std::runtime_error("load_instance: n does not match points");
  if (j.contains("weights")) inst.weights = j["weights"].get<std::vector<double>>();
  if (j.contains("meta")) {
    const auto& m = j["meta"];
    inst.meta.generator = m.value("generator", "");
    inst.meta.seed = m.value("seed", 0L);
    if (m.contains("params"))
      inst.meta.params = m["params"].get<std::map<std::string, double>>();
  }
  inst.validate();
  return inst;
}

}  // namespace instances
}  // namespace medianlab
