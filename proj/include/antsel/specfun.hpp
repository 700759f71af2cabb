#pragma once

#include <span>
#include <vector>

#include "antsel/rational.hpp"

namespace antsel {

// log Gamma(x) for x > 0.
double ln_gamma(double x);

// Regularized lower incomplete gamma P(s, x) = gamma(s, x) / Gamma(s),
// s > 0, x >= 0. Series for x < s + 1, continued fraction otherwise.
double reg_lower_gamma(double s, double x);

// Gaussian tail probability Q(x) = 0.5 erfc(x / sqrt(2)).
double gaussian_q(double x);

// Kummer confluent hypergeometric 1F1(a; b; x). b must not be a
// non-positive integer. Negative arguments go through the Kummer transform
// 1F1(a;b;x) = e^x 1F1(b-a;b;-x) so every series summed has positive terms.
double kummer_1f1(double a, double b, double x);

// ln 1F1(1; b; x) for x >= 0, b > 1. Uses the closed form
// 1F1(1;b;x) = Gamma(b) e^x x^(1-b) P(b-1, x) once the series would grow,
// which keeps arguments of any size in range.
long double kummer_1f1_one_ln(double b, double x);

// Gauss hypergeometric 2F1(a, b; c; x) on |x| < 1. Applies the Euler
// transformation when c-a-b < 0 (slow tail) and the Pfaff transformation
// for x < 0.
double gauss_2f1(double a, double b, double c, double x);

struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
    // ln(weights): tail weights of high-order rules underflow double, and the
    // hypergeometric integrands grow fast enough that those nodes still matter.
    std::vector<long double> log_weights;
};

// Gauss-Laguerre rule of order n (weight e^-x on [0, inf)), 1 <= n <= 512.
// Rules are computed once and cached.
const QuadratureRule& gauss_laguerre_rule(int n);

// Gauss-Legendre rule of order n on [-1, 1] (log_weights left empty).
const QuadratureRule& gauss_legendre_rule(int n);

// Lauricella F_A^(n)(a; b_1..b_n; c_1..c_n; x_1..x_n) for a > 0, c_i > 0 and
// sum |x_i| < 1, evaluated by quadrature of the integral representation
// (1/Gamma(a)) Int_0^inf e^-t t^(a-1) prod 1F1(b_i;c_i;x_i t) dt.
// Evaluated by composite Gauss-Legendre quadrature over geometrically
// growing panels of the Euler integral representation, run at two node
// counts; disagreement between the two resolutions raises EvalError.
double lauricella_fa(double a, std::span<const double> b, std::span<const double> c,
                     std::span<const double> x);

// Appell F2(a; b1, b2; c1, c2; x, y) on |x| + |y| < 1 (the n = 2 Lauricella).
double appell_f2(double a, double b1, double b2, double c1, double c2, double x,
                 double y);

struct MultinomialTable {
    int t = 0;
    int mg = 1;
    std::vector<Rational> beta; // beta[r], r = 0 .. t*(mg-1)
};

// Coefficients of (sum_{k=0}^{mg-1} y^k / k!)^t as exact rationals.
const MultinomialTable& multinomial_coeffs(int t, int mg);

} // namespace antsel
