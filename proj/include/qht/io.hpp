#pragma once

#include <string>

#include "qht/linalg.hpp"

namespace qht {

// State file: {"dim": d, "matrix": [[[re,im], ...], ...]} row-major.
// Distribution file: {"probs": [p1, ..., pk]}.
Matrix read_matrix_json(const std::string& path);
DensityMatrix read_state(const std::string& path, bool require_full_rank = true);
ClassicalDistribution read_distribution(const std::string& path, bool require_full_support = true);

void write_state(const std::string& path, const Matrix& m);
void write_distribution(const std::string& path, const ClassicalDistribution& p);

// Either a density-matrix file or a distribution file; distributions are
// embedded as diagonal states.
DensityMatrix read_state_or_distribution(const std::string& path, bool require_full_rank = true);

std::string format_seventeen(double x);  // 17 significant digits, round-trip safe

}  // namespace qht
