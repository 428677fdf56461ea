#include "delaystab/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <unsupported/Eigen/MatrixFunctions>

namespace delaystab::linalg {

Matrix expm(const Matrix& A) { return A.exp(); }

double spectral_abscissa(const Matrix& A) {
  Eigen::EigenSolver<Matrix> solver(A, false);
  if (solver.info() != Eigen::Success) throw DomainError("eigenvalue solver failed");
  return solver.eigenvalues().real().maxCoeff();
}

Matrix gram_factor(const Matrix& gram, Index dim) {
  if (gram.size() == 0) return Matrix::Identity(dim, dim);
  Eigen::LLT<Matrix> llt(gram);
  if (llt.info() != Eigen::Success) throw DomainError("gram matrix is not positive definite");
  return llt.matrixL();
}

double spectral_norm(const Matrix& T) {
  if (T.size() == 0) return 0.0;
  // The smaller Gram product is cheaper and has the same top eigenvalue.
  const Matrix G = T.rows() <= T.cols() ? Matrix(T * T.transpose()) : Matrix(T.transpose() * T);
  Eigen::SelfAdjointEigenSolver<Matrix> eig(G, Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(0.0, eig.eigenvalues().maxCoeff()));
}

double weighted_operator_norm(const Matrix& T, const Matrix& L_in, const Matrix& L_out) {
  // ||T x||_out / ||x||_in with x = L_in^{-T} y.
  const Matrix right = L_in.transpose().triangularView<Eigen::Upper>().solve<Eigen::OnTheRight>(
      Matrix(L_out.transpose() * T));
  return spectral_norm(right);
}

QuadratureRule gauss_legendre(int points) {
  if (points < 1) throw DomainError("Gauss-Legendre rule needs at least one point");
  QuadratureRule rule;
  rule.nodes.resize(static_cast<std::size_t>(points));
  rule.weights.resize(static_cast<std::size_t>(points));
  const int n = points;
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 1.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p1 = 1.0;
      double p2 = 0.0;
      for (int j = 1; j <= n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j - 1.0) * x * p2 - (j - 1.0) * p3) / j;
      }
      dp = n * (x * p1 - p2) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    const auto lo = static_cast<std::size_t>(i);
    const auto hi = static_cast<std::size_t>(n - 1 - i);
    rule.nodes[lo] = 0.5 * (1.0 - x);
    rule.nodes[hi] = 0.5 * (1.0 + x);
    rule.weights[lo] = 0.5 * w;
    rule.weights[hi] = 0.5 * w;
  }
  return rule;
}

CubicStencil cubic_stencil(double x, int m) {
  if (m < 3) throw DomainError("cubic stencil needs at least 4 samples");
  const int cell = std::clamp(static_cast<int>(std::floor(x)), 0, m - 1);
  CubicStencil s;
  s.start = std::clamp(cell - 1, 0, m - 3);
  for (int a = 0; a < 4; ++a) {
    double w = 1.0;
    for (int b = 0; b < 4; ++b) {
      if (b == a) continue;
      w *= (x - (s.start + b)) / static_cast<double>(a - b);
    }
    s.weights[static_cast<std::size_t>(a)] = w;
  }
  return s;
}

}  // namespace delaystab::linalg
