#include "caegcn/sparse.hpp"

#include <algorithm>
#include <stdexcept>

namespace caegcn {

bool SparseGraph::has_edge(std::size_t i, std::size_t j) const {
    const auto begin = col_idx.begin() + long(row_ptr[i]);
    const auto end = col_idx.begin() + long(row_ptr[i + 1]);
    return std::binary_search(begin, end, j);
}

DenseMatrix SparseGraph::to_dense() const {
    DenseMatrix out(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = row_ptr[i]; k < row_ptr[i + 1]; ++k) {
            out(i, col_idx[k]) = weights[k];
        }
    }
    return out;
}

SparseGraph SparseGraph::from_edges(
    std::size_t n, const std::vector<std::pair<std::size_t, std::size_t>>& edges) {
    std::vector<std::pair<std::size_t, std::size_t>> sym;
    sym.reserve(edges.size() * 2);
    for (const auto& [i, j] : edges) {
        if (i >= n || j >= n) {
            throw std::invalid_argument("from_edges: node id out of range");
        }
        if (i == j) continue;
        sym.emplace_back(i, j);
        sym.emplace_back(j, i);
    }
    std::sort(sym.begin(), sym.end());
    sym.erase(std::unique(sym.begin(), sym.end()), sym.end());

    SparseGraph g;
    g.n = n;
    g.symmetric = true;
    g.row_ptr.assign(n + 1, 0);
    g.col_idx.reserve(sym.size());
    g.weights.assign(sym.size(), 1.0);
    for (const auto& [i, j] : sym) g.row_ptr[i + 1]++;
    for (std::size_t i = 0; i < n; ++i) g.row_ptr[i + 1] += g.row_ptr[i];
    for (const auto& [i, j] : sym) g.col_idx.push_back(j);
    return g;
}

DenseMatrix GraphFilter::to_dense() const {
    DenseMatrix out(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = row_ptr[i]; k < row_ptr[i + 1]; ++k) {
            out(i, col_idx[k]) = values[k];
        }
    }
    return out;
}

void spmm_acc(DenseMatrix& out, const GraphFilter& filter, const DenseMatrix& x) {
    if (x.rows() != filter.n) {
        throw std::invalid_argument("spmm: filter is " + std::to_string(filter.n) + "x" +
                                    std::to_string(filter.n) + " but input is " + x.shape_str());
    }
    if (out.rows() != filter.n || out.cols() != x.cols()) {
        throw std::invalid_argument("spmm: bad output shape " + out.shape_str());
    }
    const std::size_t cols = x.cols();
#pragma omp parallel for schedule(static) if (filter.n * cols >= (1u << 18))
    for (long long ii = 0; ii < (long long)filter.n; ++ii) {
        const std::size_t i = (std::size_t)ii;
        double* orow = out.row(i);
        for (std::size_t k = filter.row_ptr[i]; k < filter.row_ptr[i + 1]; ++k) {
            const double v = filter.values[k];
            const double* xrow = x.row(filter.col_idx[k]);
            for (std::size_t j = 0; j < cols; ++j) orow[j] += v * xrow[j];
        }
    }
}

DenseMatrix spmm(const GraphFilter& filter, const DenseMatrix& x) {
    DenseMatrix out(filter.n, x.cols());
    spmm_acc(out, filter, x);
    return out;
}

}  // namespace caegcn
