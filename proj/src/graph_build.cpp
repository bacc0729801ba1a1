#include "caegcn/graph_build.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace caegcn {

namespace {

double sq_distance(const DenseMatrix& x, std::size_t i, std::size_t j) {
    const double* a = x.row(i);
    const double* b = x.row(j);
    double acc = 0.0;
    for (std::size_t k = 0; k < x.cols(); ++k) {
        const double d = a[k] - b[k];
        acc += d * d;
    }
    return acc;
}

void require_at_least_two(const DenseMatrix& x, const char* op) {
    if (x.rows() < 2) {
        throw std::invalid_argument(std::string(op) + ": need at least 2 samples, got " +
                                    std::to_string(x.rows()));
    }
}

}  // namespace

DenseMatrix heat_kernel_similarity(const DenseMatrix& x, double t) {
    require_at_least_two(x, "heat_kernel_similarity");
    if (!(t > 0.0)) {
        throw std::invalid_argument("heat_kernel_similarity: t must be > 0, got " +
                                    std::to_string(t));
    }
    const std::size_t n = x.rows();
    DenseMatrix s(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        s(i, i) = 1.0;
        for (std::size_t j = i + 1; j < n; ++j) {
            const double v = std::exp(-sq_distance(x, i, j) / t);
            s(i, j) = v;
            s(j, i) = v;
        }
    }
    return s;
}

DenseMatrix inner_product_similarity(const DenseMatrix& x) {
    require_at_least_two(x, "inner_product_similarity");
    const std::size_t n = x.rows();
    DenseMatrix s(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) {
            const double* a = x.row(i);
            const double* b = x.row(j);
            double acc = 0.0;
            for (std::size_t k = 0; k < x.cols(); ++k) acc += a[k] * b[k];
            s(i, j) = acc;
            s(j, i) = acc;
        }
    }
    return s;
}

double median_sq_distance(const DenseMatrix& x) {
    require_at_least_two(x, "median_sq_distance");
    std::vector<double> d2;
    d2.reserve(x.rows() * (x.rows() - 1) / 2);
    for (std::size_t i = 0; i < x.rows(); ++i) {
        for (std::size_t j = i + 1; j < x.rows(); ++j) d2.push_back(sq_distance(x, i, j));
    }
    const std::size_t mid = d2.size() / 2;
    std::nth_element(d2.begin(), d2.begin() + long(mid), d2.end());
    const double med = d2[mid];
    return med > 0.0 ? med : 1.0;
}

std::vector<std::vector<std::size_t>> knn_neighbors(const DenseMatrix& s, std::size_t k) {
    if (s.rows() != s.cols()) {
        throw std::invalid_argument("knn_neighbors: similarity must be square, got " +
                                    s.shape_str());
    }
    const std::size_t n = s.rows();
    if (k < 1 || k >= n) {
        throw std::invalid_argument("knn_neighbors: need 1 <= K < N, got K=" + std::to_string(k) +
                                    " N=" + std::to_string(n));
    }
    std::vector<std::vector<std::size_t>> out(n);
    std::vector<std::size_t> order(n - 1);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t pos = 0;
        for (std::size_t j = 0; j < n; ++j) {
            if (j != i) order[pos++] = j;
        }
        const double* row = s.row(i);
        std::partial_sort(order.begin(), order.begin() + long(k), order.end(),
                          [row](std::size_t a, std::size_t b) {
                              if (row[a] != row[b]) return row[a] > row[b];
                              return a < b;
                          });
        out[i].assign(order.begin(), order.begin() + long(k));
    }
    return out;
}

SparseGraph knn_graph(const DenseMatrix& s, std::size_t k) {
    const auto neighbors = knn_neighbors(s, k);
    std::vector<std::pair<std::size_t, std::size_t>> edges;
    edges.reserve(neighbors.size() * k);
    for (std::size_t i = 0; i < neighbors.size(); ++i) {
        for (std::size_t j : neighbors[i]) edges.emplace_back(i, j);
    }
    return SparseGraph::from_edges(s.rows(), edges);
}

GraphFilter normalize_filter(const SparseGraph& a) {
    if (!a.symmetric) {
        throw std::invalid_argument("normalize_filter: input graph must be symmetric");
    }
    if (a.n == 0) throw std::invalid_argument("normalize_filter: empty graph");
    std::vector<double> deg(a.n, 1.0);  // self-loop contributes 1 to every row
    for (std::size_t i = 0; i < a.n; ++i) {
        for (std::size_t e = a.row_ptr[i]; e < a.row_ptr[i + 1]; ++e) {
            if (a.col_idx[e] == i) {
                throw std::invalid_argument("normalize_filter: input graph has a self-loop at " +
                                            std::to_string(i));
            }
            deg[i] += a.weights[e];
        }
    }
    // Each undirected entry is computed once (upper triangle) and mirrored,
    // making the filter symmetric to the last bit.
    std::vector<std::vector<std::pair<std::size_t, double>>> rows(a.n);
    for (std::size_t i = 0; i < a.n; ++i) {
        rows[i].emplace_back(i, 1.0 / deg[i]);
        for (std::size_t e = a.row_ptr[i]; e < a.row_ptr[i + 1]; ++e) {
            const std::size_t j = a.col_idx[e];
            if (j < i) continue;
            const double v = a.weights[e] / std::sqrt(deg[i] * deg[j]);
            rows[i].emplace_back(j, v);
            rows[j].emplace_back(i, v);
        }
    }
    GraphFilter f;
    f.n = a.n;
    f.row_ptr.assign(a.n + 1, 0);
    for (std::size_t i = 0; i < a.n; ++i) {
        std::sort(rows[i].begin(), rows[i].end());
        f.row_ptr[i + 1] = f.row_ptr[i] + rows[i].size();
    }
    f.col_idx.reserve(f.row_ptr[a.n]);
    f.values.reserve(f.row_ptr[a.n]);
    for (std::size_t i = 0; i < a.n; ++i) {
        for (const auto& [j, v] : rows[i]) {
            f.col_idx.push_back(j);
            f.values.push_back(v);
        }
    }
    return f;
}

SparseGraph load_graph(const std::string& path, std::optional<std::size_t> expect_n) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_graph: cannot open " + path);
    std::vector<std::pair<std::size_t, std::size_t>> edges;
    std::size_t max_id = 0;
    bool any = false;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ss(line);
        long long i = 0, j = 0;
        if (!(ss >> i)) continue;  // blank or comment-only line
        if (!(ss >> j)) {
            throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                     ": expected two node ids");
        }
        std::string rest;
        if (ss >> rest) {
            throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                     ": trailing content '" + rest + "'");
        }
        if (i < 0 || j < 0) {
            throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                     ": negative node id");
        }
        const auto ui = std::size_t(i), uj = std::size_t(j);
        if (expect_n && (ui >= *expect_n || uj >= *expect_n)) {
            throw std::runtime_error(path + ":" + std::to_string(lineno) + ": node id " +
                                     std::to_string(std::max(ui, uj)) + " out of range [0, " +
                                     std::to_string(*expect_n) + ")");
        }
        edges.emplace_back(ui, uj);
        max_id = std::max({max_id, ui, uj});
        any = true;
    }
    if (!any) throw std::runtime_error("load_graph: no edges in " + path);
    const std::size_t n = expect_n ? *expect_n : max_id + 1;
    return SparseGraph::from_edges(n, edges);
}

}  // namespace caegcn
