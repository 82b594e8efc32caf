#include "skel/kernels.hpp"

namespace skel {

CsrMatrix to_csr(const SparseMatrix& a) {
  CsrMatrix m;
  m.rows = a.rows();
  m.cols = a.cols();
  m.row_ptr.assign(static_cast<std::size_t>(a.rows()) + 1, 0);
  m.col_idx.reserve(static_cast<std::size_t>(a.nnz()));
  m.values.reserve(static_cast<std::size_t>(a.nnz()));
  for (const auto& t : a.entries()) {
    ++m.row_ptr[static_cast<std::size_t>(t.row) + 1];
    m.col_idx.push_back(t.col);
    m.values.push_back(t.value);
  }
  for (std::size_t i = 1; i < m.row_ptr.size(); ++i) m.row_ptr[i] += m.row_ptr[i - 1];
  return m;
}

namespace kernels::scalar {

double dot(std::span<const double> x, std::span<const double> y) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

void axpy(double a, std::span<const double> x, std::span<double> y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += a * x[i];
}

void spmv(const CsrMatrix& a, std::span<const double> x, std::span<double> y) {
  for (Index r = 0; r < a.rows; ++r) {
    double s = 0.0;
    for (Index p = a.row_ptr[static_cast<std::size_t>(r)];
         p < a.row_ptr[static_cast<std::size_t>(r) + 1]; ++p) {
      s += a.values[static_cast<std::size_t>(p)] *
           x[static_cast<std::size_t>(a.col_idx[static_cast<std::size_t>(p)])];
    }
    y[static_cast<std::size_t>(r)] = s;
  }
}

void residual(const CsrMatrix& a, std::span<const double> x,
              std::span<const double> b, std::span<double> r) {
  for (Index i = 0; i < a.rows; ++i) {
    double s = 0.0;
    for (Index p = a.row_ptr[static_cast<std::size_t>(i)];
         p < a.row_ptr[static_cast<std::size_t>(i) + 1]; ++p) {
      s += a.values[static_cast<std::size_t>(p)] *
           x[static_cast<std::size_t>(a.col_idx[static_cast<std::size_t>(p)])];
    }
    r[static_cast<std::size_t>(i)] = b[static_cast<std::size_t>(i)] - s;
  }
}

}  // namespace kernels::scalar
}  // namespace skel
