#pragma once

#include <cstddef>
#include <vector>

namespace rdio {

using Vec = std::vector<double>;

/// Dense row-major matrix, sized for desk-scale problems (m <= a few dozen).
struct Mat {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Mat() = default;
  Mat(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), data(r * c, fill) {}

  double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }
  bool empty() const { return data.empty(); }
};

namespace linalg {

double dot(const Vec& a, const Vec& b);
void axpyInPlace(double alpha, const Vec& x, Vec& y);
double normInf(const Vec& x);
double norm2(const Vec& x);
Vec scaled(const Vec& x, double alpha);
Vec sub(const Vec& a, const Vec& b);
Vec add(const Vec& a, const Vec& b);

/// y = M x.
Vec matVec(const Mat& m, const Vec& x);

/// Smallest eigenvalue of a symmetric matrix via cyclic Jacobi rotations.
double minSymmetricEigenvalue(const Mat& m);

bool isSymmetric(const Mat& m, double tol = 1e-12);

}  // namespace linalg

}  // namespace rdio
