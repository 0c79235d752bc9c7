#pragma once

#include <vector>

#include "halfbvm/common.hpp"

namespace halfbvm {

// In-place unnormalized DFT, X_k = sum_j x_j exp(sign * 2 pi i jk / n).
// Plans are cached per (n, sign); execution is safe from several threads.
void fft_inplace(cd* data, int n, int sign);
void fft_inplace(Vec& v, int sign);

// In-place unnormalized DST-I, X_k = 2 sum_j x_j sin(pi (j+1)(k+1) / (n+1)),
// applied to real and imaginary parts. Its own inverse up to 1 / (2 (n+1)).
void dst1_inplace(cd* data, int n);

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// n-point Gauss-Legendre rule on [a, b].
QuadratureRule gauss_legendre(int n, double a, double b);

// panels x order points, panels of equal width on [a, b].
QuadratureRule composite_gauss_legendre(double a, double b, int panels, int order);

// Least-squares slope of log(y) against log(x).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace halfbvm
