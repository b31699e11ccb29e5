#include "bic/specfun.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace bic {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kSeriesLimit = 12.0;

void require_finite(double x, const char* what) {
  if (!std::isfinite(x)) throw std::domain_error(std::string(what) + ": non-finite argument");
}

// J_n(x) by the ascending series, n >= 0.
double jn_series(int n, double x) {
  const double h = 0.5 * x;
  double term = 1.0;
  for (int i = 1; i <= n; ++i) term *= h / i;
  double sum = term;
  const double h2 = h * h;
  for (int k = 0; k < 500; ++k) {
    term *= -h2 / ((k + 1.0) * (n + k + 1.0));
    sum += term;
    if (std::abs(term) <= 1e-17 * std::abs(sum) && k > x) break;
  }
  return sum;
}

// J_0..J_nmax by Miller's backward recurrence normalized with J0 + 2 sum J_2k = 1.
std::vector<double> jn_miller(int nmax, double x) {
  const int top = std::max(nmax, static_cast<int>(x));
  int start = top + 20 + static_cast<int>(std::sqrt(40.0 * top));
  if (start % 2) ++start;
  std::vector<double> out(nmax + 1, 0.0);
  double jp1 = 0.0, j = 1e-30, norm = 0.0;
  for (int k = start; k > 0; --k) {
    const double jm1 = 2.0 * k / x * j - jp1;
    jp1 = j;
    j = jm1;
    if (std::abs(j) > 1e250) {
      jp1 *= 1e-250;
      j *= 1e-250;
      norm *= 1e-250;
      for (auto& v : out) v *= 1e-250;
    }
    if (k - 1 <= nmax) out[k - 1] = j;
    if ((k - 1) % 2 == 0 && k - 1 > 0) norm += 2.0 * j;
  }
  norm += j;
  for (auto& v : out) v /= norm;
  return out;
}

// J_{n-1}, J_n, J_{n+1} for n >= 0, x >= 0 (J_{-1} = -J_1).
std::array<double, 3> jn_triple(int n, double x) {
  if (x == 0.0) {
    std::array<double, 3> r{0.0, n == 0 ? 1.0 : 0.0, 0.0};
    if (n == 1) r[0] = 1.0;
    return r;
  }
  if (x < kSeriesLimit) {
    const double jm = n == 0 ? -jn_series(1, x) : jn_series(n - 1, x);
    return {jm, jn_series(n, x), jn_series(n + 1, x)};
  }
  const auto v = jn_miller(n + 1, x);
  return {n == 0 ? -v[1] : v[n - 1], v[n], v[n + 1]};
}

double sph_series(int l, double x) {
  double term = 1.0;
  for (int i = 1; i <= l; ++i) term *= x / (2.0 * i + 1.0);
  double sum = term;
  const double q = -0.5 * x * x;
  for (int k = 0; k < 500; ++k) {
    term *= q / ((k + 1.0) * (2.0 * l + 2.0 * k + 3.0));
    sum += term;
    if (std::abs(term) <= 1e-17 * std::abs(sum) && k > x) break;
  }
  return sum;
}

// j_0..j_lmax for x >= kSeriesLimit.
std::vector<double> sph_large(int lmax, double x) {
  std::vector<double> out(lmax + 1);
  const double s = std::sin(x), c = std::cos(x);
  const double j0 = s / x;
  const double j1 = s / (x * x) - c / x;
  if (lmax <= x) {
    out[0] = j0;
    if (lmax >= 1) out[1] = j1;
    for (int k = 1; k < lmax; ++k) out[k + 1] = (2.0 * k + 1.0) / x * out[k] - out[k - 1];
    return out;
  }
  int start = lmax + 20 + static_cast<int>(std::sqrt(40.0 * lmax));
  double jp1 = 0.0, j = 1e-30;
  std::vector<double> raw(lmax + 2, 0.0);
  for (int k = start; k > 0; --k) {
    const double jm1 = (2.0 * k + 1.0) / x * j - jp1;
    jp1 = j;
    j = jm1;
    if (std::abs(j) > 1e250) {
      jp1 *= 1e-250;
      j *= 1e-250;
      for (auto& v : raw) v *= 1e-250;
    }
    if (k - 1 <= lmax + 1) raw[k - 1] = j;
  }
  const double scale = std::abs(j0) > std::abs(j1) ? j0 / raw[0] : j1 / raw[1];
  for (int k = 0; k <= lmax; ++k) out[k] = raw[k] * scale;
  return out;
}

// j_{l-1} (or j_1 for l = 0), j_l.
std::array<double, 2> sph_pair(int l, double x) {
  if (x < kSeriesLimit) return {l == 0 ? sph_series(1, x) : sph_series(l - 1, x), sph_series(l, x)};
  const auto v = sph_large(std::max(l, 1), x);
  return {l == 0 ? v[1] : v[l - 1], v[l]};
}

template <class F>
std::vector<double> derivative_zeros(F&& f, bool zero_first, int count) {
  std::vector<double> roots;
  if (count <= 0) return roots;
  if (zero_first) roots.push_back(0.0);
  const double step = 0.05;
  double a = step, fa = f(a);
  for (int i = 2; static_cast<int>(roots.size()) < count; ++i) {
    const double b = step * i;
    const double fb = f(b);
    if (fa == 0.0) {
      roots.push_back(a);
    } else if (fa * fb < 0.0) {
      double lo = a, hi = b, flo = fa;
      for (int it = 0; it < 200 && hi - lo > 1e-13; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if (fm == 0.0) {
          lo = hi = mid;
          break;
        }
        if ((fm < 0.0) == (flo < 0.0)) {
          lo = mid;
          flo = fm;
        } else {
          hi = mid;
        }
      }
      roots.push_back(0.5 * (lo + hi));
    }
    a = b;
    fa = fb;
    if (b > 1e4) throw std::runtime_error("derivative_zeros: root scan did not terminate");
  }
  return roots;
}

double log_factorial(int n) { return std::lgamma(n + 1.0); }

}  // namespace

BesselValue bessel_j(int n, double x) {
  require_finite(x, "bessel_j");
  double sign = 1.0, dsign = 1.0;
  if (n < 0) {
    n = -n;
    if (n % 2) sign = dsign = -1.0;
  }
  if (x < 0.0) {
    x = -x;
    if (n % 2) sign = -sign;
    else dsign = -dsign;
  }
  const auto t = jn_triple(n, x);
  return {sign * t[1], dsign * 0.5 * (t[0] - t[2])};
}

BesselValue spherical_j(int l, double x) {
  require_finite(x, "spherical_j");
  if (l < 0) throw std::domain_error("spherical_j: negative order");
  if (x < 0.0) {
    auto r = spherical_j(l, -x);
    if (l % 2) r.value = -r.value;
    else r.derivative = -r.derivative;
    return r;
  }
  if (x == 0.0) return {l == 0 ? 1.0 : 0.0, l == 1 ? 1.0 / 3.0 : 0.0};
  const auto p = sph_pair(l, x);
  const double d = l == 0 ? -p[0] : p[0] - (l + 1.0) / x * p[1];
  return {p[1], d};
}

BesselValue bessel_j_half(int l, double x) {
  require_finite(x, "bessel_j_half");
  if (l < 0) throw std::domain_error("bessel_j_half: negative order");
  if (x <= 0.0) {
    if (x == 0.0) return {0.0, l == 0 ? INFINITY : 0.0};
    throw std::domain_error("bessel_j_half: negative argument");
  }
  const auto s = spherical_j(l, x);
  const double f = std::sqrt(2.0 * x / kPi);
  return {f * s.value, f * (s.value / (2.0 * x) + s.derivative)};
}

std::vector<double> neumann_roots(int p, int count) {
  p = std::abs(p);
  return derivative_zeros([p](double x) { return bessel_j(p, x).derivative; }, p == 0, count);
}

std::vector<double> spherical_neumann_roots(int l, int count) {
  if (l < 0) throw std::domain_error("spherical_neumann_roots: negative order");
  return derivative_zeros([l](double x) { return spherical_j(l, x).derivative; }, l == 0, count);
}

double assoc_legendre(int l, int m, double x) {
  require_finite(x, "assoc_legendre");
  if (l < 0 || std::abs(m) > l) throw std::domain_error("assoc_legendre: |m| > l");
  if (std::abs(x) > 1.0) throw std::domain_error("assoc_legendre: |x| > 1");
  if (m < 0) {
    const int am = -m;
    const double f = std::exp(log_factorial(l - am) - log_factorial(l + am));
    return (am % 2 ? -1.0 : 1.0) * f * assoc_legendre(l, am, x);
  }
  double pmm = 1.0;
  const double s = std::sqrt((1.0 - x) * (1.0 + x));
  for (int i = 1; i <= m; ++i) pmm *= -(2.0 * i - 1.0) * s;
  if (l == m) return pmm;
  double pm1 = x * (2.0 * m + 1.0) * pmm;
  if (l == m + 1) return pm1;
  double pl = 0.0;
  for (int ll = m + 2; ll <= l; ++ll) {
    pl = (x * (2.0 * ll - 1.0) * pm1 - (ll + m - 1.0) * pmm) / (ll - m);
    pmm = pm1;
    pm1 = pl;
  }
  return pl;
}

std::complex<double> spherical_harmonic(int l, int m, double theta, double phi) {
  require_finite(theta, "spherical_harmonic");
  require_finite(phi, "spherical_harmonic");
  if (l < 0 || std::abs(m) > l) throw std::domain_error("spherical_harmonic: |m| > l");
  const int am = std::abs(m);
  const double k = std::sqrt((2.0 * l + 1.0) / (4.0 * kPi) *
                             std::exp(log_factorial(l - am) - log_factorial(l + am)));
  const double p = assoc_legendre(l, am, std::cos(theta));
  std::complex<double> y = k * p * std::polar(1.0, am * phi);
  if (m < 0) y = (am % 2 ? -1.0 : 1.0) * std::conj(y);
  return y;
}

double wigner_small_d(int l, int m, int k, double beta) {
  require_finite(beta, "wigner_small_d");
  if (l < 0 || std::abs(m) > l || std::abs(k) > l) throw std::domain_error("wigner_small_d: index out of range");
  const double c = std::cos(0.5 * beta), s = std::sin(0.5 * beta);
  const double pre = 0.5 * (log_factorial(l - m) + log_factorial(l + m) - log_factorial(l - k) - log_factorial(l + k));
  auto log_binom = [](int n, int r) { return log_factorial(n) - log_factorial(r) - log_factorial(n - r); };
  double sum = 0.0;
  for (int q = std::max(0, k - m); q <= std::min(l - m, l + k); ++q) {
    const double sign = ((m - k + q) % 2 == 0) ? 1.0 : -1.0;
    const double mag = std::exp(pre + log_binom(l + k, q) + log_binom(l - k, m - k + q));
    sum += sign * mag * std::pow(c, 2 * l - m + k - 2 * q) * std::pow(s, m - k + 2 * q);
  }
  return sum;
}

Eigen::MatrixXd wigner_small_d_matrix(int l, double beta) {
  Eigen::MatrixXd d(2 * l + 1, 2 * l + 1);
  for (int m = -l; m <= l; ++m)
    for (int k = -l; k <= l; ++k) d(m + l, k + l) = wigner_small_d(l, m, k, beta);
  return d;
}

void gauss_legendre(int n, double a, double b, std::vector<double>& x, std::vector<double>& w) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n < 1");
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = z;
      for (int j = 2; j <= n; ++j) {
        const double p2 = ((2.0 * j - 1.0) * z * p1 - (j - 1.0) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0;
      dp = n * (z * p1 - p0) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    x[i] = mid - half * z;
    x[n - 1 - i] = mid + half * z;
    w[i] = w[n - 1 - i] = 2.0 * half / ((1.0 - z * z) * dp * dp);
  }
}

}  // namespace bic
