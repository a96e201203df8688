#include "dea/stats.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace dea::stats {

namespace {

constexpr double kTolerance = 1e-10;
constexpr int kMaxIterations = 500;
constexpr double kTiny = 1e-300;

// Modified Lentz evaluation of the continued fraction for I_x(a, b).
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
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kTolerance) return h;
  }
  throw std::runtime_error("incomplete beta continued fraction did not converge");
}

}  // namespace

double mean(std::span<const double> xs) {
  if (xs.empty()) throw std::invalid_argument("mean of an empty sample");
  double sum = 0.0;
  for (double x : xs) sum += x;
  return sum / static_cast<double>(xs.size());
}

double sample_stddev(std::span<const double> xs) {
  if (xs.size() < 2) throw std::invalid_argument("standard deviation needs at least two values");
  const double m = mean(xs);
  double ss = 0.0;
  for (double x : xs) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

double incomplete_beta(double a, double b, double x) {
  if (a <= 0.0 || b <= 0.0) throw std::domain_error("incomplete beta needs positive shape parameters");
  if (x < 0.0 || x > 1.0) throw std::domain_error("incomplete beta argument outside [0, 1]");
  if (x == 0.0 || x == 1.0) return x;
  const double log_front =
      std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(log_front);
  // Use the symmetry relation where the fraction converges fastest.
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_continued_fraction(a, b, x) / a;
  return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double t_two_tailed_p(double t, double dof) {
  if (!(dof > 0.0)) throw std::domain_error("degrees of freedom must be positive");
  if (std::isinf(t)) return 0.0;
  return incomplete_beta(dof / 2.0, 0.5, dof / (dof + t * t));
}

double t_critical(double dof, double confidence) {
  if (!(confidence > 0.0 && confidence < 1.0)) throw std::domain_error("confidence must lie in (0, 1)");
  const double alpha = 1.0 - confidence;
  double lo = 0.0;
  double hi = 1.0;
  while (t_two_tailed_p(hi, dof) > alpha) hi *= 2.0;
  for (int i = 0; i < 200 && hi - lo > 1e-12; ++i) {
    const double mid = 0.5 * (lo + hi);
    (t_two_tailed_p(mid, dof) > alpha ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

TTestResult welch_t_test(std::span<const double> a, std::span<const double> b, double confidence) {
  if (a.size() < 2 || b.size() < 2) throw std::invalid_argument("t-test needs at least two values per sample");
  if (!(confidence > 0.0 && confidence < 1.0)) throw std::invalid_argument("confidence must lie in (0, 1)");
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  const double ma = mean(a);
  const double mb = mean(b);
  const double sa = sample_stddev(a);
  const double sb = sample_stddev(b);
  const double va = sa * sa / na;
  const double vb = sb * sb / nb;

  TTestResult r;
  if (va + vb == 0.0) {
    r.degenerate = true;
    r.dof = na + nb - 2.0;
    if (ma == mb) {
      r.t = 0.0;
      r.p_value = 1.0;
      r.significant = false;
    } else {
      r.t = ma > mb ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
      r.p_value = 0.0;
      r.significant = true;
    }
    return r;
  }
  r.t = (ma - mb) / std::sqrt(va + vb);
  r.dof = (va + vb) * (va + vb) / (va * va / (na - 1.0) + vb * vb / (nb - 1.0));
  r.p_value = t_two_tailed_p(r.t, r.dof);
  r.significant = r.p_value < 1.0 - confidence;
  return r;
}

double difficulty(double f_ave, double f_opt) {
  if (!(f_opt > 0.0)) throw std::invalid_argument("optimum must be positive");
  return (f_ave - f_opt) / f_opt;
}

}  // namespace dea::stats
