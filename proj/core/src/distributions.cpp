#include "varboot/distributions.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace varboot {

namespace {

constexpr double kSqrt2 = 1.4142135623730951;
constexpr double kSqrt2Pi = 2.5066282746310002;

double lgamma_half_ratio(int nu) {
  // log Gamma((nu+1)/2) - log Gamma(nu/2)
  return std::lgamma(0.5 * (nu + 1)) - std::lgamma(0.5 * nu);
}

// Regularized incomplete beta I_x(a,b) by Lentz's continued fraction.
double betacf(double a, double b, double x) {
  constexpr int kMaxIter = 300;
  constexpr double kEps = 1e-15;
  constexpr double kTiny = 1e-300;
  double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) return h;
  }
  throw std::runtime_error("incomplete beta continued fraction did not converge");
}

double reg_inc_beta(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                    a * std::log(x) + b * std::log1p(-x);
  double front = std::exp(ln_front);
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return front * betacf(a, b, x) / a;
  }
  return 1.0 - front * betacf(b, a, 1.0 - x) / b;
}

double student_scale(int nu) { return std::sqrt(static_cast<double>(nu) / (nu - 2)); }

}  // namespace

double normal_pdf(double x) { return std::exp(-0.5 * x * x) / kSqrt2Pi; }

double normal_cdf(double x) { return 0.5 * std::erfc(-x / kSqrt2); }

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw std::invalid_argument("normal_quantile: p must lie in (0,1)");
  }
  // Acklam's rational approximation.
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double p_low = 0.02425;
  double x;
  if (p < p_low) {
    double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - p_low) {
    double q = p - 0.5;
    double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    double q = std::sqrt(-2.0 * std::log1p(-p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  // One Halley step against the erfc-based cdf.
  double e = normal_cdf(x) - p;
  double u = e * kSqrt2Pi * std::exp(0.5 * x * x);
  x -= u / (1.0 + 0.5 * x * u);
  return x;
}

double student_t_pdf(double x, int nu) {
  double ln = lgamma_half_ratio(nu) - 0.5 * std::log(nu * std::numbers::pi) -
              0.5 * (nu + 1) * std::log1p(x * x / nu);
  return std::exp(ln);
}

double student_t_cdf(double x, int nu) {
  if (x == 0.0) return 0.5;
  double z = static_cast<double>(nu) / (nu + x * x);
  double tail = 0.5 * reg_inc_beta(0.5 * nu, 0.5, z);
  return x < 0.0 ? tail : 1.0 - tail;
}

double student_t_quantile(double p, int nu) {
  if (!(p > 0.0 && p < 1.0)) {
    throw std::invalid_argument("student_t_quantile: p must lie in (0,1)");
  }
  // Bracket from a normal start, then bisection + Newton polish.
  double lo = -1e3, hi = 1e3;
  double x = normal_quantile(p);
  for (int i = 0; i < 200; ++i) {
    double f = student_t_cdf(x, nu) - p;
    if (f > 0.0) {
      hi = x;
    } else {
      lo = x;
    }
    double dens = student_t_pdf(x, nu);
    double step = f / dens;
    double next = x - step;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::fabs(next - x) < 1e-14 * (1.0 + std::fabs(x))) return next;
    x = next;
  }
  return x;
}

void validate(const InnovationDist& dist) {
  if (const auto* t = std::get_if<NormalizedStudentT>(&dist)) {
    if (t->nu <= 4) {
      throw std::invalid_argument("NormalizedStudentT requires nu > 4");
    }
  }
}

double innovation_pdf(const InnovationDist& dist, double x) {
  if (std::holds_alternative<StandardNormal>(dist)) return normal_pdf(x);
  int nu = std::get<NormalizedStudentT>(dist).nu;
  double c = student_scale(nu);
  return c * student_t_pdf(c * x, nu);
}

double innovation_cdf(const InnovationDist& dist, double x) {
  if (std::holds_alternative<StandardNormal>(dist)) return normal_cdf(x);
  int nu = std::get<NormalizedStudentT>(dist).nu;
  return student_t_cdf(student_scale(nu) * x, nu);
}

double innovation_quantile(const InnovationDist& dist, double p) {
  if (std::holds_alternative<StandardNormal>(dist)) return normal_quantile(p);
  int nu = std::get<NormalizedStudentT>(dist).nu;
  return student_t_quantile(p, nu) / student_scale(nu);
}

double innovation_kurtosis(const InnovationDist& dist) {
  if (std::holds_alternative<StandardNormal>(dist)) return 3.0;
  int nu = std::get<NormalizedStudentT>(dist).nu;
  return 3.0 * (nu - 2) / static_cast<double>(nu - 4);
}

double draw_innovation(const InnovationDist& dist, SplitMix64& rng) {
  double z = normal_quantile(rng.next_uniform_open());
  if (std::holds_alternative<StandardNormal>(dist)) return z;
  int nu = std::get<NormalizedStudentT>(dist).nu;
  double chi2 = 0.0;
  for (int i = 0; i < nu; ++i) {
    double g = normal_quantile(rng.next_uniform_open());
    chi2 += g * g;
  }
  double t = z / std::sqrt(chi2 / nu);
  return t / student_scale(nu);
}

}  // namespace varboot
