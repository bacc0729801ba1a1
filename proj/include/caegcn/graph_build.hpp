#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "caegcn/matrix.hpp"
#include "caegcn/sparse.hpp"

namespace caegcn {

// S_ij = exp(-||x_i - x_j||^2 / t); symmetric with unit diagonal. Computed on
// the upper triangle and mirrored so symmetry is exact.
DenseMatrix heat_kernel_similarity(const DenseMatrix& x, double t);

// S_ij = <x_i, x_j>; symmetric.
DenseMatrix inner_product_similarity(const DenseMatrix& x);

// Median of the squared pairwise distances; fallback scale 1.0 when the
// median degenerates to zero (duplicate-heavy inputs).
double median_sq_distance(const DenseMatrix& x);

// The K most similar neighbors of each node (self excluded), ordered by
// descending similarity with ties broken toward the smaller index.
std::vector<std::vector<std::size_t>> knn_neighbors(const DenseMatrix& s, std::size_t k);

// Directed KNN edges symmetrized by union with weight 1, no self-loops.
SparseGraph knn_graph(const DenseMatrix& s, std::size_t k);

// D^-1/2 (A+I) D^-1/2. Requires a symmetric input without self-loops.
GraphFilter normalize_filter(const SparseGraph& a);

// Edge-list text file: one "i j" pair per line, '#' starts a comment,
// undirected interpretation, duplicates and self-loops tolerated. When
// `expect_n` is given, node ids must lie in [0, expect_n).
SparseGraph load_graph(const std::string& path,
                       std::optional<std::size_t> expect_n = std::nullopt);

}  // namespace caegcn
