#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "caegcn/matrix.hpp"

namespace caegcn {

// Undirected N-node adjacency in CSR form. Stores no self-loops; self-loops
// enter only when the normalized filter forms A + I.
struct SparseGraph {
    std::size_t n = 0;
    std::vector<std::size_t> row_ptr;  // n + 1
    std::vector<std::size_t> col_idx;  // sorted within each row, no duplicates
    std::vector<double> weights;       // parallel to col_idx
    bool symmetric = false;

    std::size_t edge_count() const { return col_idx.size(); }  // directed entries
    std::size_t degree(std::size_t i) const { return row_ptr[i + 1] - row_ptr[i]; }
    bool has_edge(std::size_t i, std::size_t j) const;

    DenseMatrix to_dense() const;

    // Builds a symmetric graph from directed edge pairs: symmetrizes by union,
    // deduplicates, drops self-loops. All kept edges get weight 1.
    static SparseGraph from_edges(std::size_t n,
                                  const std::vector<std::pair<std::size_t, std::size_t>>& edges);
};

// The normalized convolution operator D^-1/2 (A+I) D^-1/2 in CSR form.
// Entries for (i,j) and (j,i) are the same double by construction.
struct GraphFilter {
    std::size_t n = 0;
    std::vector<std::size_t> row_ptr;
    std::vector<std::size_t> col_idx;
    std::vector<double> values;

    DenseMatrix to_dense() const;
};

// filter * x
DenseMatrix spmm(const GraphFilter& filter, const DenseMatrix& x);
// out += filter * x  (filter is symmetric, so this also serves the transpose)
void spmm_acc(DenseMatrix& out, const GraphFilter& filter, const DenseMatrix& x);

}  // namespace caegcn
