#pragma once

// Vector kernels used by the solvers. Each kernel has a scalar reference in
// skel::kernels::scalar and, on x86-64, an AVX2 variant in
// skel::kernels::avx2. The unqualified entry points dispatch on the ISA chosen
// at first use (or forced through set_active_isa).

#include <span>
#include <string_view>
#include <vector>

#include "skel/sparse.hpp"

namespace skel {

/// Compressed sparse row view built from a canonical SparseMatrix.
struct CsrMatrix {
  Index rows = 0;
  Index cols = 0;
  std::vector<Index> row_ptr;
  std::vector<Index> col_idx;
  std::vector<double> values;

  Index nnz() const noexcept { return static_cast<Index>(values.size()); }
};

CsrMatrix to_csr(const SparseMatrix& a);

namespace kernels {

enum class Isa { scalar, avx2 };

std::string_view isa_name(Isa isa) noexcept;
/// Best ISA supported by both the build and the running CPU.
Isa detected_isa() noexcept;
Isa active_isa() noexcept;
/// Throws std::invalid_argument when the ISA is not available here.
void set_active_isa(Isa isa);

double dot(std::span<const double> x, std::span<const double> y);
double norm2(std::span<const double> x);
/// y += a * x
void axpy(double a, std::span<const double> x, std::span<double> y);
/// y = A x
void spmv(const CsrMatrix& a, std::span<const double> x, std::span<double> y);
/// r = b - A x
void residual(const CsrMatrix& a, std::span<const double> x,
              std::span<const double> b, std::span<double> r);

namespace scalar {
double dot(std::span<const double> x, std::span<const double> y);
void axpy(double a, std::span<const double> x, std::span<double> y);
void spmv(const CsrMatrix& a, std::span<const double> x, std::span<double> y);
void residual(const CsrMatrix& a, std::span<const double> x,
              std::span<const double> b, std::span<double> r);
}  // namespace scalar

#if defined(__x86_64__) || defined(_M_X64)
#define SKEL_HAVE_AVX2_KERNELS 1
namespace avx2 {
double dot(std::span<const double> x, std::span<const double> y);
void axpy(double a, std::span<const double> x, std::span<double> y);
void spmv(const CsrMatrix& a, std::span<const double> x, std::span<double> y);
void residual(const CsrMatrix& a, std::span<const double> x,
              std::span<const double> b, std::span<double> r);
}  // namespace avx2
#else
#define SKEL_HAVE_AVX2_KERNELS 0
#endif

}  // namespace kernels
}  // namespace skel
