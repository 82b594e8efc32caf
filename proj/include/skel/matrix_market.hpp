#pragma once

// Matrix Market coordinate I/O. Values are written in shortest round-trip
// decimal form so read(write(A)) == A exactly.

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>

#include "skel/sparse.hpp"

namespace skel {

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// With symmetric = true only the lower triangle is written and the header
/// says "symmetric"; the matrix must actually be symmetric.
void write_matrix_market(std::ostream& out, const SparseMatrix& a,
                         bool symmetric = false);
void write_matrix_market(const std::filesystem::path& path,
                         const SparseMatrix& a, bool symmetric = false);

/// Accepts coordinate real|integer|pattern with general|symmetric storage.
SparseMatrix read_matrix_market(std::istream& in);
SparseMatrix read_matrix_market(const std::filesystem::path& path);

/// Shortest decimal text that parses back to the same double.
std::string format_double(double v);

}  // namespace skel
