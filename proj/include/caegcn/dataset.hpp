#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "caegcn/matrix.hpp"

namespace caegcn {

// CSV of decimal reals, one sample per row, fixed column count. Parse errors
// carry file:line[:column] locations.
DenseMatrix load_features_csv(const std::string& path);

// One nonnegative integer per line.
std::vector<std::size_t> load_labels(const std::string& path);

}  // namespace caegcn
