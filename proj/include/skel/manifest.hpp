#pragma once

// One directory per lineage: manifest.json plus Matrix Market files for the
// level adjacencies, inter-level maps and prolongations.

#include <filesystem>

#include "skel/lineage.hpp"

namespace skel {

/// Creates dir if needed and overwrites any files of the same names.
void write_lineage(const std::filesystem::path& dir, const GradedGraph& gg);
/// Throws FormatError on a missing or malformed manifest.
GradedGraph read_lineage(const std::filesystem::path& dir);

}  // namespace skel
