#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "skel/kernels.hpp"

using namespace skel;

namespace {

std::vector<double> random_vector(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

CsrMatrix random_csr(std::mt19937_64& rng, Index r, Index c, double density) {
  std::bernoulli_distribution keep(density);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  std::vector<Triplet> t;
  for (Index i = 0; i < r; ++i)
    for (Index j = 0; j < c; ++j)
      if (keep(rng)) t.push_back({i, j, u(rng)});
  return to_csr(SparseMatrix::from_triplets(r, c, std::move(t)));
}

// Reference y = A x summed in plain row order, plus Σ|a_ij x_j| per row for
// the rounding bound.
std::pair<std::vector<double>, std::vector<double>> reference_spmv(const CsrMatrix& a,
                                                                   const std::vector<double>& x) {
  std::vector<double> y(static_cast<std::size_t>(a.rows)), mag(y.size());
  for (Index i = 0; i < a.rows; ++i) {
    for (Index k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k) {
      const double p = a.values[k] * x[a.col_idx[k]];
      y[i] += p;
      mag[i] += std::abs(p);
    }
  }
  return {y, mag};
}

constexpr double kRel = 64 * 2.3e-16;

}  // namespace

TEST_SUITE_BEGIN("kernels");

TEST_CASE("csr conversion") {
  const auto m = SparseMatrix::from_triplets(3, 4, {{0, 1, 2.0}, {2, 0, 1.0}, {2, 3, -1.0}});
  const auto c = to_csr(m);
  CHECK(c.rows == 3);
  CHECK(c.cols == 4);
  CHECK(c.row_ptr == std::vector<Index>{0, 1, 1, 3});
  CHECK(c.col_idx == std::vector<Index>{1, 0, 3});
  CHECK(c.values == std::vector<double>{2.0, 1.0, -1.0});
  CHECK(c.nnz() == 3);
}

TEST_CASE("scalar kernels against plain loops") {
  std::mt19937_64 rng(1);
  for (std::size_t n : {0u, 1u, 3u, 4u, 7u, 33u}) {
    const auto x = random_vector(rng, n), y0 = random_vector(rng, n);
    double d = 0.0, mag = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      d += x[i] * y0[i];
      mag += std::abs(x[i] * y0[i]);
    }
    CHECK(std::abs(kernels::scalar::dot(x, y0) - d) <= kRel * mag);
    auto y = y0;
    kernels::scalar::axpy(0.75, x, y);
    for (std::size_t i = 0; i < n; ++i) CHECK(y[i] == 0.75 * x[i] + y0[i]);
  }
  const auto a = random_csr(rng, 9, 13, 0.3);
  const auto x = random_vector(rng, 13), b = random_vector(rng, 9);
  std::vector<double> y(9), r(9);
  kernels::scalar::spmv(a, x, y);
  kernels::scalar::residual(a, x, b, r);
  const auto [ref, mag] = reference_spmv(a, x);
  for (std::size_t i = 0; i < 9; ++i) {
    CHECK(std::abs(y[i] - ref[i]) <= kRel * mag[i]);
    CHECK(std::abs(r[i] - (b[i] - ref[i])) <= kRel * (mag[i] + std::abs(b[i])));
  }
}

#if SKEL_HAVE_AVX2_KERNELS
TEST_CASE("avx2 kernels match the scalar reference") {
  if (kernels::detected_isa() != kernels::Isa::avx2) {
    MESSAGE("CPU lacks AVX2; equivalence not exercised");
    return;
  }
  std::mt19937_64 rng(2);
  for (std::size_t n : {0u, 1u, 2u, 3u, 4u, 5u, 8u, 15u, 16u, 17u, 100u, 1023u}) {
    const auto x = random_vector(rng, n), y0 = random_vector(rng, n);
    double mag = 0.0;
    for (std::size_t i = 0; i < n; ++i) mag += std::abs(x[i] * y0[i]);
    CHECK(std::abs(kernels::avx2::dot(x, y0) - kernels::scalar::dot(x, y0)) <= kRel * mag);
    auto ys = y0, yv = y0;
    kernels::scalar::axpy(-1.25, x, ys);
    kernels::avx2::axpy(-1.25, x, yv);
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(std::abs(ys[i] - yv[i]) <= kRel * (std::abs(1.25 * x[i]) + std::abs(y0[i])));
    }
  }
  for (int trial = 0; trial < 10; ++trial) {
    const Index r = 1 + trial * 7, c = 1 + trial * 5;
    const auto a = random_csr(rng, r, c, trial % 2 ? 0.6 : 0.15);
    const auto x = random_vector(rng, static_cast<std::size_t>(c));
    const auto b = random_vector(rng, static_cast<std::size_t>(r));
    std::vector<double> ys(r), yv(r), rs(r), rv(r);
    kernels::scalar::spmv(a, x, ys);
    kernels::avx2::spmv(a, x, yv);
    kernels::scalar::residual(a, x, b, rs);
    kernels::avx2::residual(a, x, b, rv);
    const auto mag = reference_spmv(a, x).second;
    for (Index i = 0; i < r; ++i) {
      CHECK(std::abs(ys[i] - yv[i]) <= kRel * mag[i]);
      CHECK(std::abs(rs[i] - rv[i]) <= kRel * (mag[i] + std::abs(b[i])));
    }
  }
}
#endif

TEST_CASE("dispatch") {
  const auto saved = kernels::active_isa();
  kernels::set_active_isa(kernels::Isa::scalar);
  CHECK(kernels::active_isa() == kernels::Isa::scalar);
  CHECK(kernels::isa_name(kernels::Isa::scalar) == "scalar");
  const std::vector<double> x{3.0, 4.0};
  CHECK(kernels::norm2(x) == 5.0);
  if (kernels::detected_isa() == kernels::Isa::avx2) {
    kernels::set_active_isa(kernels::Isa::avx2);
    CHECK(kernels::active_isa() == kernels::Isa::avx2);
    CHECK(kernels::norm2(x) == 5.0);
  } else {
    CHECK_THROWS(kernels::set_active_isa(kernels::Isa::avx2));
  }
  kernels::set_active_isa(saved);

  std::vector<double> y(3);
  CHECK_THROWS_AS(kernels::dot(x, y), DimensionError);
  CHECK_THROWS_AS(kernels::axpy(1.0, x, y), DimensionError);
  const auto a = to_csr(SparseMatrix::identity(2));
  CHECK_THROWS_AS(kernels::spmv(a, x, y), DimensionError);
}

TEST_SUITE_END();
