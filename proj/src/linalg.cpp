#include "rdio/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "rdio/kernels.hpp"

namespace rdio::linalg {

double dot(const Vec& a, const Vec& b) {
  if (a.size() != b.size()) throw std::invalid_argument("dot: size mismatch");
  return kernels::dot(a.data(), b.data(), a.size());
}

void axpyInPlace(double alpha, const Vec& x, Vec& y) {
  if (x.size() != y.size()) throw std::invalid_argument("axpy: size mismatch");
  kernels::axpy(alpha, x.data(), y.data(), x.size());
}

double normInf(const Vec& x) { return kernels::maxAbs(x.data(), x.size()); }

double norm2(const Vec& x) { return std::sqrt(kernels::dot(x.data(), x.data(), x.size())); }

Vec scaled(const Vec& x, double alpha) {
  Vec out = x;
  kernels::scale(alpha, out.data(), out.size());
  return out;
}

Vec sub(const Vec& a, const Vec& b) {
  Vec out = a;
  kernels::axpy(-1.0, b.data(), out.data(), out.size());
  return out;
}

Vec add(const Vec& a, const Vec& b) {
  Vec out = a;
  kernels::axpy(1.0, b.data(), out.data(), out.size());
  return out;
}

Vec matVec(const Mat& m, const Vec& x) {
  if (m.cols != x.size()) throw std::invalid_argument("matVec: size mismatch");
  Vec out(m.rows, 0.0);
  for (std::size_t i = 0; i < m.rows; ++i) {
    out[i] = kernels::dot(&m.data[i * m.cols], x.data(), m.cols);
  }
  return out;
}

bool isSymmetric(const Mat& m, double tol) {
  if (m.rows != m.cols) return false;
  for (std::size_t i = 0; i < m.rows; ++i) {
    for (std::size_t j = i + 1; j < m.cols; ++j) {
      if (std::fabs(m(i, j) - m(j, i)) > tol * (1.0 + std::fabs(m(i, j)))) return false;
    }
  }
  return true;
}

double minSymmetricEigenvalue(const Mat& m) {
  if (m.rows != m.cols) throw std::invalid_argument("minSymmetricEigenvalue: not square");
  const std::size_t n = m.rows;
  if (n == 0) return 0.0;
  Mat a = m;
  // cyclic Jacobi sweeps; plenty for the small symmetric matrices used here
  for (int sweep = 0; sweep < 64; ++sweep) {
    double off = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) off += a(i, j) * a(i, j);
    if (off < 1e-24) break;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        if (std::fabs(a(p, q)) < 1e-300) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
      }
    }
  }
  double lo = a(0, 0);
  for (std::size_t i = 1; i < n; ++i) lo = std::min(lo, a(i, i));
  return lo;
}

}  // namespace rdio::linalg
