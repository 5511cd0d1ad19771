#pragma once

#include <cstddef>
#include <string_view>

namespace rdio::kernels {

// Dense double-precision kernels behind the simplex and Frank-Wolfe inner
// loops. A SIMD implementation is selected once at startup when the CPU
// supports it; the `scalar` namespace holds the reference semantics that
// every variant is equivalence-tested against.

/// Inner product a'b over n entries.
double dot(const double* a, const double* b, std::size_t n);

/// y += alpha * x over n entries.
void axpy(double alpha, const double* x, double* y, std::size_t n);

/// x *= alpha over n entries.
void scale(double alpha, double* x, std::size_t n);

/// max_i |x_i|, 0 for empty input.
double maxAbs(const double* x, std::size_t n);

/// Name of the dispatched implementation: "avx2", "neon" or "scalar".
std::string_view activeBackend();

namespace scalar {
double dot(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
void scale(double alpha, double* x, std::size_t n);
double maxAbs(const double* x, std::size_t n);
}  // namespace scalar

#if defined(__x86_64__) || defined(_M_X64)
namespace avx2 {
double dot(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
void scale(double alpha, double* x, std::size_t n);
double maxAbs(const double* x, std::size_t n);
}  // namespace avx2
#endif

#if defined(__aarch64__) || defined(_M_ARM64)
namespace neon {
double dot(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
void scale(double alpha, double* x, std::size_t n);
double maxAbs(const double* x, std::size_t n);
}  // namespace neon
#endif

}  // namespace rdio::kernels
