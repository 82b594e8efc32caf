// Built with -mavx2 -mfma; only reached when the dispatcher has confirmed CPU
// support.

#include "skel/kernels.hpp"

#if SKEL_HAVE_AVX2_KERNELS

#include <immintrin.h>

namespace skel::kernels::avx2 {

namespace {

double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

// Gathered row dot product; columns are 64-bit indices.
double row_dot(const CsrMatrix& a, Index begin, Index end, const double* x) {
  const double* vals = a.values.data();
  const long long* cols = reinterpret_cast<const long long*>(a.col_idx.data());
  __m256d acc = _mm256_setzero_pd();
  Index p = begin;
  for (; p + 4 <= end; p += 4) {
    const __m256i idx = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(cols + p));
    const __m256d xv = _mm256_i64gather_pd(x, idx, 8);
    acc = _mm256_fmadd_pd(_mm256_loadu_pd(vals + p), xv, acc);
  }
  double s = hsum(acc);
  for (; p < end; ++p) s += vals[p] * x[cols[p]];
  return s;
}

}  // namespace

double dot(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  __m256d a0 = _mm256_setzero_pd();
  __m256d a1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    a0 = _mm256_fmadd_pd(_mm256_loadu_pd(&x[i]), _mm256_loadu_pd(&y[i]), a0);
    a1 = _mm256_fmadd_pd(_mm256_loadu_pd(&x[i + 4]), _mm256_loadu_pd(&y[i + 4]), a1);
  }
  double s = hsum(_mm256_add_pd(a0, a1));
  for (; i < n; ++i) s += x[i] * y[i];
  return s;
}

void axpy(double a, std::span<const double> x, std::span<double> y) {
  const std::size_t n = x.size();
  const __m256d av = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(&y[i], _mm256_fmadd_pd(av, _mm256_loadu_pd(&x[i]),
                                            _mm256_loadu_pd(&y[i])));
  }
  for (; i < n; ++i) y[i] += a * x[i];
}

void spmv(const CsrMatrix& a, std::span<const double> x, std::span<double> y) {
  for (Index r = 0; r < a.rows; ++r) {
    y[static_cast<std::size_t>(r)] =
        row_dot(a, a.row_ptr[static_cast<std::size_t>(r)],
                a.row_ptr[static_cast<std::size_t>(r) + 1], x.data());
  }
}

void residual(const CsrMatrix& a, std::span<const double> x,
              std::span<const double> b, std::span<double> r) {
  for (Index i = 0; i < a.rows; ++i) {
    const auto u = static_cast<std::size_t>(i);
    r[u] = b[u] - row_dot(a, a.row_ptr[u], a.row_ptr[u + 1], x.data());
  }
}

}  // namespace skel::kernels::avx2

#endif
