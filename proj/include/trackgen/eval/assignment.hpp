#pragma once

#include <vector>

namespace trackgen::eval {

/// Minimum-cost assignment (Hungarian method) for an n x m cost matrix with
/// n <= m. Returns, for each row, the column assigned to it.
std::vector<int> solve_assignment(const std::vector<std::vector<double>>& cost);

}  // namespace trackgen::eval
