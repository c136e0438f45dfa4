#include "qpp/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include <fmt/format.h>

namespace qpp {

namespace {

constexpr double kEps = 1e-16;
constexpr double kTiny = 1e-300;
constexpr int kMaxIterations = 100000;

// lgamma(x) - Stirling approximation, for x >= 10 via its asymptotic series.
double stirling_correction(double x) {
  if (x < 10.0) {
    return std::lgamma(x) - ((x - 0.5) * std::log(x) - x + 0.5 * std::log(2.0 * std::numbers::pi));
  }
  const double x2 = x * x;
  return (1.0 / 12.0 - (1.0 / 360.0 - (1.0 / 1260.0 - (1.0 / 1680.0) / x2) / x2) / x2) / x;
}

// log( x^a y^b / B(a, b) ) with y = 1 - x passed separately to avoid cancellation.
double log_of(double x, double y) { return x > 0.5 ? std::log1p(-y) : std::log(x); }

// lgamma(l + s) - lgamma(l) for l >= 10 without subtracting two huge values.
double lgamma_ratio(double l, double s) {
  return (l - 0.5) * std::log1p(s / l) + s * std::log(l + s) - s + stirling_correction(l + s) -
         stirling_correction(l);
}

double log_beta_front(double a, double b, double x, double y) {
  if (a < 10.0 && b < 10.0) {
    return a * log_of(x, y) + b * log_of(y, x) - (std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b));
  }
  if (a < 10.0 || b < 10.0) {
    const double small = std::min(a, b);
    const double large = std::max(a, b);
    return a * log_of(x, y) + b * log_of(y, x) - std::lgamma(small) + lgamma_ratio(large, small);
  }
  const double s = a + b;
  // a ln(x s / a) + b ln(y s / b), written via log1p of the relative deviation
  const double dev = (x * b - y * a);
  const double term_a = a * std::log1p(dev / a);
  const double term_b = b * std::log1p(-dev / b);
  return term_a + term_b + 0.5 * std::log(a * b / s) - 0.5 * std::log(2.0 * std::numbers::pi) +
         (stirling_correction(s) - stirling_correction(a) - stirling_correction(b));
}

// Continued fraction for I_x(a, b) / front, modified Lentz.
double beta_continued_fraction(double a, double b, double x) {
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIterations; ++m) {
    const double md = static_cast<double>(m);
    const double m2 = 2.0 * md;
    double aa = md * (b - md) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + md) * (qab + md) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < kEps) return h;
  }
  throw std::runtime_error(fmt::format("incomplete beta continued fraction did not converge (a={}, b={}, x={})", a, b, x));
}

double incomplete_beta_xy(double a, double b, double x, double y) {
  if (!(a > 0.0) || !(b > 0.0)) throw std::invalid_argument("incomplete_beta: a and b must be positive");
  if (x < 0.0 || y < 0.0) throw std::invalid_argument("incomplete_beta: x outside [0, 1]");
  if (x == 0.0) return 0.0;
  if (y == 0.0) return 1.0;
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return std::exp(log_beta_front(a, b, x, y)) * beta_continued_fraction(a, b, x) / a;
  }
  return 1.0 - std::exp(log_beta_front(b, a, y, x)) * beta_continued_fraction(b, a, y) / b;
}

// P(T > t) for t >= 0.
double student_t_upper_tail(double t, double df) {
  const double t2 = t * t;
  return 0.5 * incomplete_beta_xy(df / 2.0, 0.5, df / (df + t2), t2 / (df + t2));
}

} // namespace

double incomplete_beta(double a, double b, double x) {
  if (x < 0.0 || x > 1.0) throw std::invalid_argument("incomplete_beta: x outside [0, 1]");
  return incomplete_beta_xy(a, b, x, 1.0 - x);
}

double f_survival(double f, double df1, double df2) {
  if (!(df1 > 0.0) || !(df2 > 0.0)) throw std::invalid_argument("f_survival: degrees of freedom must be positive");
  if (std::isnan(f)) throw std::invalid_argument("f_survival: F is NaN");
  if (f <= 0.0) return 1.0;
  if (std::isinf(f)) return 0.0;
  // P(F > f) = I_{d2/(d2 + d1 f)}(d2/2, d1/2)
  const double denom = df2 + df1 * f;
  const double x = df2 / denom;
  const double y = df1 * f / denom;
  return incomplete_beta_xy(df2 / 2.0, df1 / 2.0, x, y);
}

double student_t_cdf(double t, double df) {
  if (!(df > 0.0)) throw std::invalid_argument("student_t_cdf: df must be positive");
  if (std::isinf(t)) return t > 0 ? 1.0 : 0.0;
  const double tail = student_t_upper_tail(std::abs(t), df);
  return t > 0 ? 1.0 - tail : tail;
}

double student_t_quantile(double p, double df) {
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("student_t_quantile: p must be in (0, 1)");
  if (!(df > 0.0)) throw std::invalid_argument("student_t_quantile: df must be positive");
  if (p == 0.5) return 0.0;
  if (p < 0.5) return -student_t_quantile(1.0 - p, df);
  // bisection on the upper tail, which is monotone decreasing in t
  const double q = 1.0 - p;
  double lo = 0.0;
  double hi = 1.0;
  while (student_t_upper_tail(hi, df) > q) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e300) return std::numeric_limits<double>::infinity();
  }
  for (int i = 0; i < 2000 && hi - lo > 2.0 * std::numeric_limits<double>::epsilon() * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (student_t_upper_tail(mid, df) > q) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

} // namespace qpp
