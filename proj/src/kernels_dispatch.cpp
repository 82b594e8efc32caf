#include <atomic>
#include <cmath>
#include <stdexcept>
#include <string>

#include "skel/kernels.hpp"

namespace skel::kernels {

namespace {

void check_len(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    throw DimensionError(std::string(what) + ": length " + std::to_string(a) +
                         " vs " + std::to_string(b));
  }
}

void check_csr(const CsrMatrix& a, std::size_t x, std::size_t y, const char* what) {
  check_len(static_cast<std::size_t>(a.cols), x, what);
  check_len(static_cast<std::size_t>(a.rows), y, what);
}

bool cpu_has_avx2() noexcept {
#if SKEL_HAVE_AVX2_KERNELS && (defined(__GNUC__) || defined(__clang__))
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

std::atomic<Isa>& active() {
  static std::atomic<Isa> isa{detected_isa()};
  return isa;
}

}  // namespace

std::string_view isa_name(Isa isa) noexcept {
  switch (isa) {
    case Isa::avx2:
      return "avx2";
    case Isa::scalar:
      break;
  }
  return "scalar";
}

Isa detected_isa() noexcept { return cpu_has_avx2() ? Isa::avx2 : Isa::scalar; }

Isa active_isa() noexcept { return active().load(std::memory_order_relaxed); }

void set_active_isa(Isa isa) {
  if (isa == Isa::avx2 && !cpu_has_avx2()) {
    throw std::invalid_argument("avx2 kernels are not available on this CPU");
  }
  active().store(isa, std::memory_order_relaxed);
}

double dot(std::span<const double> x, std::span<const double> y) {
  check_len(x.size(), y.size(), "dot");
#if SKEL_HAVE_AVX2_KERNELS
  if (active_isa() == Isa::avx2) return avx2::dot(x, y);
#endif
  return scalar::dot(x, y);
}

double norm2(std::span<const double> x) { return std::sqrt(dot(x, x)); }

void axpy(double a, std::span<const double> x, std::span<double> y) {
  check_len(x.size(), y.size(), "axpy");
#if SKEL_HAVE_AVX2_KERNELS
  if (active_isa() == Isa::avx2) return avx2::axpy(a, x, y);
#endif
  scalar::axpy(a, x, y);
}

void spmv(const CsrMatrix& a, std::span<const double> x, std::span<double> y) {
  check_csr(a, x.size(), y.size(), "spmv");
#if SKEL_HAVE_AVX2_KERNELS
  if (active_isa() == Isa::avx2) return avx2::spmv(a, x, y);
#endif
  scalar::spmv(a, x, y);
}

void residual(const CsrMatrix& a, std::span<const double> x,
              std::span<const double> b, std::span<double> r) {
  check_csr(a, x.size(), r.size(), "residual");
  check_len(b.size(), r.size(), "residual");
#if SKEL_HAVE_AVX2_KERNELS
  if (active_isa() == Isa::avx2) return avx2::residual(a, x, b, r);
#endif
  scalar::residual(a, x, b, r);
}

}  // namespace skel::kernels
