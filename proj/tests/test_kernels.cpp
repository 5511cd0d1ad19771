#include <doctest.h>

#include <cmath>
#include <vector>

#include "rdio/kernels.hpp"
#include "rdio/util.hpp"

namespace k = rdio::kernels;

namespace {

std::vector<double> randomVec(rdio::Rng& rng, std::size_t n, double lo = -1.0, double hi = 1.0) {
  std::vector<double> v(n);
  for (auto& x : v) x = rng.uniform(lo, hi);
  return v;
}

}  // namespace

TEST_CASE("scalar kernels match hand arithmetic") {
  const double a[] = {1.0, 2.0, 3.0};
  const double b[] = {4.0, -5.0, 6.0};
  CHECK(k::scalar::dot(a, b, 3) == doctest::Approx(12.0));

  double y[] = {1.0, 1.0, 1.0};
  k::scalar::axpy(2.0, a, y, 3);
  CHECK(y[0] == doctest::Approx(3.0));
  CHECK(y[2] == doctest::Approx(7.0));

  double s[] = {2.0, -4.0};
  k::scalar::scale(0.5, s, 2);
  CHECK(s[0] == doctest::Approx(1.0));
  CHECK(s[1] == doctest::Approx(-2.0));

  CHECK(k::scalar::maxAbs(b, 3) == doctest::Approx(6.0));
  CHECK(k::scalar::maxAbs(b, 0) == doctest::Approx(0.0));
}

TEST_CASE("dispatched backend is equivalent to the scalar reference") {
  rdio::Rng rng(20240517);
  INFO("active backend: ", k::activeBackend());
  // sizes straddling the vector width and remainder handling
  for (std::size_t n : {0u, 1u, 3u, 4u, 7u, 8u, 17u, 64u, 255u, 1024u}) {
    for (int rep = 0; rep < 8; ++rep) {
      const auto a = randomVec(rng, n, -5.0, 5.0);
      const auto b = randomVec(rng, n, -5.0, 5.0);

      double magnitude = 0.0;
      for (std::size_t i = 0; i < n; ++i) magnitude += std::fabs(a[i] * b[i]);
      const double tol = 1e-13 * (1.0 + magnitude);
      CHECK(std::fabs(k::dot(a.data(), b.data(), n) - k::scalar::dot(a.data(), b.data(), n)) <= tol);

      auto y1 = randomVec(rng, n);
      auto y2 = y1;
      const double alpha = rng.uniform(-3.0, 3.0);
      k::axpy(alpha, a.data(), y1.data(), n);
      k::scalar::axpy(alpha, a.data(), y2.data(), n);
      for (std::size_t i = 0; i < n; ++i) CHECK(y1[i] == doctest::Approx(y2[i]).epsilon(1e-14));

      auto s1 = a;
      auto s2 = a;
      k::scale(alpha, s1.data(), n);
      k::scalar::scale(alpha, s2.data(), n);
      for (std::size_t i = 0; i < n; ++i) CHECK(s1[i] == s2[i]);  // same single multiply

      CHECK(k::maxAbs(a.data(), n) == k::scalar::maxAbs(a.data(), n));
    }
  }
}

#if defined(__x86_64__) || defined(_M_X64)
TEST_CASE("avx2 variant agrees with scalar when the cpu has it") {
  if (!__builtin_cpu_supports("avx2")) return;
  rdio::Rng rng(7);
  const auto a = randomVec(rng, 133, -10.0, 10.0);
  const auto b = randomVec(rng, 133, -10.0, 10.0);
  const double want = k::scalar::dot(a.data(), b.data(), a.size());
  const double got = k::avx2::dot(a.data(), b.data(), a.size());
  CHECK(got == doctest::Approx(want).epsilon(1e-13));
  CHECK(k::avx2::maxAbs(a.data(), a.size()) == k::scalar::maxAbs(a.data(), a.size()));
}
#endif
