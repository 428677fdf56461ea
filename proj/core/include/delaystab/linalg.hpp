#pragma once

#include <array>
#include <vector>

#include "delaystab/types.hpp"

namespace delaystab::linalg {

/// Dense matrix exponential (scaling and squaring Pade).
Matrix expm(const Matrix& A);

/// Largest real part over the eigenvalues of A.
double spectral_abscissa(const Matrix& A);

/// Lower factor L with gram = L L^T; identity when gram is empty.
Matrix gram_factor(const Matrix& gram, Index dim);

/// Operator norm of T : (R^n, W_in) -> (R^m, W_out), given lower factors of
/// the two Gram matrices.
double weighted_operator_norm(const Matrix& T, const Matrix& L_in, const Matrix& L_out);

/// Largest singular value.
double spectral_norm(const Matrix& T);

/// Gauss-Legendre rule mapped to [0, 1].
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
QuadratureRule gauss_legendre(int points);

/// Four-point Lagrange stencil for evaluating a sampled signal at fractional
/// position x in [0, m], using only samples 0..m (requires m >= 3).
struct CubicStencil {
  int start = 0;
  std::array<double, 4> weights{};
};
CubicStencil cubic_stencil(double x, int m);

}  // namespace delaystab::linalg
