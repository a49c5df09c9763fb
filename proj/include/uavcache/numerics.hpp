// Dense real-matrix kernel and the numeric tolerance policy shared by every
// other module.
#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>

#include "uavcache/error.hpp"
#include "uavcache/random.hpp"

namespace uavcache {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

namespace tol {
/// Relative cutoff on singular values for the pseudo-inverse.
inline constexpr double kPinvRelative = 1e-12;
/// Symmetry check for eigendecomposition inputs (relative to max |a_ij|).
inline constexpr double kSymmetry = 1e-10;
/// Weights and other quantities required to sum to one.
inline constexpr double kUnitSum = 1e-12;
/// Target accuracy of the rescaled reservoir spectral radius.
inline constexpr double kSpectralRadius = 1e-6;
/// Multiplicative headroom applied to a computed minimum power so the
/// achieved rate is never rounded below its target.
inline constexpr double kPowerHeadroom = 1e-9;
/// Quantities below this are treated as zero (probabilities, weights).
inline constexpr double kTiny = 1e-300;
}  // namespace tol

inline void require_finite(const Mat& a, const char* what) {
  if (!a.allFinite()) throw NumericError(std::string(what) + ": non-finite entries");
}

/// Standard product with an explicit dimension check.
inline Mat matmul(const Mat& a, const Mat& b) {
  if (a.cols() != b.rows()) {
    throw DimensionError("matmul: " + std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                         " times " + std::to_string(b.rows()) + "x" + std::to_string(b.cols()));
  }
  return a * b;
}

/// Solves a x = b for symmetric positive definite a (Cholesky).
inline Mat solve_spd(const Mat& a, const Mat& b) {
  if (a.rows() != a.cols() || a.rows() != b.rows()) throw DimensionError("solve_spd: shape mismatch");
  Eigen::LLT<Mat> llt(a);
  if (llt.info() != Eigen::Success) throw NumericError("solve_spd: matrix is not positive definite");
  // LLT reports success on tiny negative pivots only through NaNs; check them.
  const Mat& l = llt.matrixLLT();
  for (Eigen::Index i = 0; i < l.rows(); ++i) {
    if (!(l(i, i) > 0.0)) throw NumericError("solve_spd: non-positive pivot");
  }
  return llt.solve(b);
}

/// Moore-Penrose pseudo-inverse; singular values below tol * sigma_max are dropped.
inline Mat pinv(const Mat& a, double tol = tol::kPinvRelative) {
  if (a.size() == 0) return Mat(a.cols(), a.rows());
  Eigen::BDCSVD<Mat> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vec& s = svd.singularValues();
  const double smax = s.size() > 0 ? s(0) : 0.0;
  if (smax <= 0.0) return Mat::Zero(a.cols(), a.rows());
  Vec inv = Vec::Zero(s.size());
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s(i) > tol * smax) inv(i) = 1.0 / s(i);
  }
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

struct SymEig {
  Vec values;   // descending
  Mat vectors;  // columns match values
};

/// Eigendecomposition of a symmetric matrix, eigenvalues sorted descending.
inline SymEig sym_eig(const Mat& a) {
  if (a.rows() != a.cols()) throw DimensionError("sym_eig: matrix not square");
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  if ((a - a.transpose()).cwiseAbs().maxCoeff() > tol::kSymmetry * scale) {
    throw NumericError("sym_eig: matrix is not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Mat> es(a);
  if (es.info() != Eigen::Success) throw NumericError("sym_eig: decomposition failed");
  const Eigen::Index n = a.rows();
  SymEig out{Vec(n), Mat(n, n)};
  // Eigen returns ascending order.
  for (Eigen::Index i = 0; i < n; ++i) {
    out.values(i) = es.eigenvalues()(n - 1 - i);
    out.vectors.col(i) = es.eigenvectors().col(n - 1 - i);
  }
  return out;
}

/// Largest eigenvalue modulus of a general square matrix.
inline double spectral_radius(const Mat& a) {
  if (a.rows() != a.cols()) throw DimensionError("spectral_radius: matrix not square");
  if (a.size() == 0) return 0.0;
  Eigen::EigenSolver<Mat> es(a, /*computeEigenvectors=*/false);
  if (es.info() != Eigen::Success) throw NumericError("spectral_radius: eigenvalue iteration failed");
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

/// Sparse-by-construction random reservoir rescaled to the requested
/// spectral radius. Entries are uniform in [-1, 1] before scaling.
inline Mat random_reservoir(int n, double density, double target_radius, RandomSource rs,
                            bool allow_unstable = false) {
  if (n <= 0) throw std::invalid_argument("random_reservoir: n must be positive");
  if (!(density > 0.0 && density <= 1.0)) throw std::invalid_argument("random_reservoir: density outside (0,1]");
  if (!(target_radius > 0.0) || (!allow_unstable && !(target_radius < 1.0))) {
    throw std::invalid_argument("random_reservoir: spectral radius outside (0,1)");
  }
  auto rng = rs.engine();
  std::uniform_real_distribution<double> entry(-1.0, 1.0);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  constexpr int kMaxDraws = 32;
  for (int draw = 0; draw < kMaxDraws; ++draw) {
    Mat w = Mat::Zero(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        if (coin(rng) < density) w(i, j) = entry(rng);
      }
    }
    const double rho = spectral_radius(w);
    if (rho > 1e-8) {
      w *= target_radius / rho;
      return w;
    }
  }
  throw NumericError("random_reservoir: repeated zero-spectral-radius draws");
}

}  // namespace uavcache
