#include "medianlab/norms.hpp"

#include <algorithm>
#include <cmath>

#include "medianlab/mechanisms.hpp"

namespace medianlab {

NormOrder NormOrder::parse(const std::string& s) {
  if (s == "inf" || s == "infinity" || s == "Inf") return infinity();
  std::size_t pos = 0;
  double q = 0.0;
  try {
    q = std::stod(s, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != s.size() || pos == 0)
    throw std::invalid_argument("NormOrder: bad value '" + s + "'");
  return finite(q);
}

double NormOrder::qq1() const {
  if (!has_conjugates()) throw std::logic_error("q/(q-1) undefined at q=1, q=inf");
  return q_ / (q_ - 1.0);
}

double NormOrder::q1q() const {
  if (!has_conjugates()) throw std::logic_error("(q-1)/q undefined at q=1, q=inf");
  return (q_ - 1.0) / q_;
}

std::string NormOrder::str() const {
  if (inf_) return "inf";
  std::string s = std::to_string(q_);
  while (s.size() > 1 && s.back() == '0') s.pop_back();
  if (!s.empty() && s.back() == '.') s.pop_back();
  return s;
}

double pow_abs(double x, double q) {
  double a = std::fabs(x);
  if (a == 0.0) return 0.0;
  if (q == 1.0) return a;
  if (q == 2.0) return a * a;
  return std::exp(q * std::log(a));
}

double lq_norm(const Point& x, const NormOrder& q) {
  for (double v : x) {
    if (!std::isfinite(v)) throw std::invalid_argument("lq_norm: non-finite coordinate");
  }
  if (q.is_inf()) {
    double m = 0.0;
    for (double v : x) m = std::max(m, std::fabs(v));
    return m;
  }
  double qq = q.q();
  if (qq == 1.0) {
    detail::KahanSum s;
    for (double v : x) s.add(std::fabs(v));
    return s.value();
  }
  // Scale by the max to keep (|v|/scale)^q in range for fractional q.
  double scale = 0.0;
  for (double v : x) scale = std::max(scale, std::fabs(v));
  if (scale == 0.0) return 0.0;
  detail::KahanSum s;
  for (double v : x) s.add(pow_abs(v / scale, qq));
  return scale * std::pow(s.value(), 1.0 / qq);
}

double lq_dist(const Point& x, const Point& y, const NormOrder& q) {
  if (x.size() != y.size()) throw std::invalid_argument("lq_dist: dimension mismatch");
  Point diff(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) diff[j] = x[j] - y[j];
  return lq_norm(diff, q);
}

double social_cost(const Instance& inst, const Point& f, const NormOrder& q) {
  if (inst.dim() != f.size()) throw std::invalid_argument("social_cost: dimension mismatch");
  detail::KahanSum s;
  Point diff(f.size());
  for (std::size_t i = 0; i < inst.n(); ++i) {
    const Point& p = inst.points[i];
    for (std::size_t j = 0; j < f.size(); ++j) diff[j] = f[j] - p[j];
    s.add(inst.weight(i) * lq_norm(diff, q));
  }
  return s.value();
}

}  // namespace medianlab
