#include "skel/matrix_market.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace skel {

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

bool blank_or_comment(const std::string& line) {
  for (char c : line) {
    if (c == '%') return true;
    if (!std::isspace(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

}  // namespace

std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void write_matrix_market(std::ostream& out, const SparseMatrix& a, bool symmetric) {
  if (symmetric && !is_symmetric(a)) {
    throw FormatError("matrix market: symmetric storage requested for a non-symmetric matrix");
  }
  Index count = 0;
  for (const auto& t : a.entries()) {
    if (!symmetric || t.row >= t.col) ++count;
  }
  out << "%%MatrixMarket matrix coordinate real " << (symmetric ? "symmetric" : "general")
      << '\n';
  out << a.rows() << ' ' << a.cols() << ' ' << count << '\n';
  for (const auto& t : a.entries()) {
    if (symmetric && t.row < t.col) continue;
    out << (t.row + 1) << ' ' << (t.col + 1) << ' ' << format_double(t.value) << '\n';
  }
}

void write_matrix_market(const std::filesystem::path& path, const SparseMatrix& a,
                         bool symmetric) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot open " + path.string() + " for writing");
  write_matrix_market(out, a, symmetric);
  if (!out) throw FormatError("write failed: " + path.string());
}

SparseMatrix read_matrix_market(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw FormatError("matrix market: empty input");
  std::istringstream head(line);
  std::string banner, object, format, field, symmetry;
  head >> banner >> object >> format >> field >> symmetry;
  if (banner != "%%MatrixMarket" || lower(object) != "matrix" ||
      lower(format) != "coordinate") {
    throw FormatError("matrix market: unsupported header '" + line + "'");
  }
  field = lower(field);
  symmetry = lower(symmetry);
  const bool is_pattern = field == "pattern";
  if (!is_pattern && field != "real" && field != "integer") {
    throw FormatError("matrix market: unsupported field '" + field + "'");
  }
  if (symmetry != "general" && symmetry != "symmetric") {
    throw FormatError("matrix market: unsupported symmetry '" + symmetry + "'");
  }
  const bool sym = symmetry == "symmetric";

  while (std::getline(in, line) && blank_or_comment(line)) {
  }
  Index rows = 0, cols = 0, count = 0;
  {
    std::istringstream size_line(line);
    if (!(size_line >> rows >> cols >> count) || rows < 0 || cols < 0 || count < 0) {
      throw FormatError("matrix market: bad size line '" + line + "'");
    }
  }
  std::vector<Triplet> entries;
  entries.reserve(static_cast<std::size_t>(sym ? 2 * count : count));
  Index seen = 0;
  while (seen < count && std::getline(in, line)) {
    if (blank_or_comment(line)) continue;
    std::istringstream ls(line);
    Index r = 0, c = 0;
    std::string value_text = "1";
    if (!(ls >> r >> c) || (!is_pattern && !(ls >> value_text))) {
      throw FormatError("matrix market: bad entry line '" + line + "'");
    }
    double v = 0.0;
    const char* first = value_text.data();
    const char* last = first + value_text.size();
    if (*first == '+') ++first;
    const auto res = std::from_chars(first, last, v);
    if (res.ec != std::errc() || res.ptr != last) {
      throw FormatError("matrix market: bad value '" + value_text + "'");
    }
    if (r < 1 || r > rows || c < 1 || c > cols) {
      throw FormatError("matrix market: index out of range in '" + line + "'");
    }
    entries.push_back({r - 1, c - 1, v});
    if (sym && r != c) entries.push_back({c - 1, r - 1, v});
    ++seen;
  }
  if (seen != count) throw FormatError("matrix market: truncated entry list");
  return SparseMatrix::from_triplets(rows, cols, std::move(entries));
}

SparseMatrix read_matrix_market(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  return read_matrix_market(in);
}

}  // namespace skel
