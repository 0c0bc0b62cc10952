#pragma once

#include <string>

#include "rmlab/ensembles.hpp"

namespace rmlab {

std::string read_text_file(const std::string& path);

/// Writes via a temporary file in the same directory plus an atomic rename,
/// so readers never observe a partially written file.
void atomic_write_file(const std::string& path, const std::string& content);

/// Matrix CSV: header row "rows,cols", then one comma-separated row per line.
/// Parse errors name the offending line.
RealMatrix read_matrix_csv(const std::string& path);
std::string matrix_to_csv(const RealMatrix& m);

}  // namespace rmlab
