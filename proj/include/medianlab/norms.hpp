#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace medianlab {

using Point = std::vector<double>;

// Exponent q of an L_q norm, q in [1, inf]. The infinity case is a
// distinct variant: the conjugate exponents q/(q-1) and (q-1)/q are
// singular at both ends, so every formula that uses them must branch
// explicitly instead of feeding a huge float through pow().
class NormOrder {
 public:
  static NormOrder finite(double q) {
    if (!(q >= 1.0)) throw std::invalid_argument("NormOrder: q must be >= 1");
    return NormOrder(q, false);
  }
  static NormOrder infinity() { return NormOrder(0.0, true); }

  // Parses "inf"/"infinity" or a decimal value >= 1.
  static NormOrder parse(const std::string& s);

  bool is_inf() const { return inf_; }
  double q() const {
    if (inf_) throw std::logic_error("NormOrder: q undefined for infinity");
    return q_;
  }
  bool is_one() const { return !inf_ && q_ == 1.0; }
  bool has_conjugates() const { return !inf_ && q_ > 1.0; }

  // q/(q-1), defined for 1 < q < inf.
  double qq1() const;
  // (q-1)/q, defined for 1 < q < inf.
  double q1q() const;

  std::string str() const;

 private:
  NormOrder(double q, bool inf) : q_(q), inf_(inf) {}
  double q_;
  bool inf_;
};

// |x|^q via exp(q*ln|x|), guarded at x = 0.
double pow_abs(double x, double q);

double lq_norm(const Point& x, const NormOrder& q);
double lq_dist(const Point& x, const Point& y, const NormOrder& q);

struct Instance;  // defined in mechanisms.hpp

// sum_i w_i * ||f - p_i||_q, w_i = 1 when the instance is unweighted.
double social_cost(const Instance& inst, const Point& f, const NormOrder& q);

namespace detail {

// Kahan-compensated accumulator; lower-bound verification sums up to
// 1e6 coordinates, where naive accumulation loses digits.
class KahanSum {
 public:
  void add(double v) {
    double y = v - c_;
    double t = s_ + y;
    c_ = (t - s_) - y;
    s_ = t;
  }
  double value() const { return s_; }

 private:
  double s_ = 0.0;
  double c_ = 0.0;
};

}  // namespace detail

}  // namespace medianlab
