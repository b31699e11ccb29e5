#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace bic {

struct BesselValue {
  double value = 0.0;
  double derivative = 0.0;
};

// J_n(x) and J_n'(x) for integer n (negative orders allowed).
BesselValue bessel_j(int n, double x);

// J_{l+1/2}(x) and its derivative, l >= 0, x > 0.
BesselValue bessel_j_half(int l, double x);

// Spherical Bessel j_l(x) and j_l'(x), l >= 0.
BesselValue spherical_j(int l, double x);

// Zeros of J_p'(x) in ascending order; for p = 0 the list starts at 0.
std::vector<double> neumann_roots(int p, int count);

// Zeros of j_l'(x) in ascending order; for l = 0 the list starts at 0.
std::vector<double> spherical_neumann_roots(int l, int count);

// P_l^m(x) with the Condon-Shortley phase, |m| <= l.
double assoc_legendre(int l, int m, double x);

// Orthonormal Y_lm on the unit sphere.
std::complex<double> spherical_harmonic(int l, int m, double theta, double phi);

// Wigner small-d element d^l_{mk}(beta).
double wigner_small_d(int l, int m, int k, double beta);

// Full (2l+1) x (2l+1) matrix, rows/cols ordered m = -l..l.
Eigen::MatrixXd wigner_small_d_matrix(int l, double beta);

// Gauss-Legendre nodes and weights on [a, b].
void gauss_legendre(int n, double a, double b, std::vector<double>& x, std::vector<double>& w);

}  // namespace bic
