#include "rdio/kernels.hpp"

#include <cmath>

namespace rdio::kernels {

namespace scalar {

double dot(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void scale(double alpha, double* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) x[i] *= alpha;
}

double maxAbs(const double* x, std::size_t n) {
  double m = 0.0;
  for (std::size_t i = 0; i < n; ++i) m = std::max(m, std::fabs(x[i]));
  return m;
}

}  // namespace scalar

namespace {

struct Dispatch {
  double (*dot)(const double*, const double*, std::size_t);
  void (*axpy)(double, const double*, double*, std::size_t);
  void (*scale)(double, double*, std::size_t);
  double (*maxAbs)(const double*, std::size_t);
  std::string_view name;
};

Dispatch pickBackend() {
#if defined(__x86_64__) || defined(_M_X64)
  if (__builtin_cpu_supports("avx2")) {
    return {&avx2::dot, &avx2::axpy, &avx2::scale, &avx2::maxAbs, "avx2"};
  }
#endif
#if defined(__aarch64__) || defined(_M_ARM64)
  return {&neon::dot, &neon::axpy, &neon::scale, &neon::maxAbs, "neon"};
#endif
  return {&scalar::dot, &scalar::axpy, &scalar::scale, &scalar::maxAbs, "scalar"};
}

const Dispatch& backend() {
  static const Dispatch d = pickBackend();
  return d;
}

}  // namespace

double dot(const double* a, const double* b, std::size_t n) { return backend().dot(a, b, n); }
void axpy(double alpha, const double* x, double* y, std::size_t n) { backend().axpy(alpha, x, y, n); }
void scale(double alpha, double* x, std::size_t n) { backend().scale(alpha, x, n); }
double maxAbs(const double* x, std::size_t n) { return backend().maxAbs(x, n); }
std::string_view activeBackend() { return backend().name; }

}  // namespace rdio::kernels
