#include "caegcn/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <stdexcept>

namespace caegcn {

namespace {

void check_lengths(const LabelVector& a, const LabelVector& b, const char* op) {
    if (a.size() != b.size()) {
        throw std::invalid_argument(std::string(op) + ": label lengths differ (" +
                                    std::to_string(a.size()) + " vs " +
                                    std::to_string(b.size()) + ")");
    }
    if (a.empty()) throw std::invalid_argument(std::string(op) + ": empty labelings");
}

std::vector<std::size_t> compact_ids(const LabelVector& y, std::size_t* k_out) {
    std::map<std::size_t, std::size_t> remap;
    for (std::size_t v : y) remap.emplace(v, 0);
    std::size_t next = 0;
    for (auto& [id, slot] : remap) slot = next++;
    std::vector<std::size_t> out(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) out[i] = remap[y[i]];
    *k_out = next;
    return out;
}

// Square contingency padded with zero rows/columns, as the matching substrate.
DenseMatrix padded_counts(const ContingencyTable& table) {
    const std::size_t k =
        std::max(table.true_marginals.size(), table.pred_marginals.size());
    DenseMatrix m(k, k);
    for (std::size_t i = 0; i < table.counts.size(); ++i) {
        for (std::size_t j = 0; j < table.counts[i].size(); ++j) {
            m(i, j) = double(table.counts[i][j]);
        }
    }
    return m;
}

// Best pred->true mapping: Hungarian on negated counts (maximize agreement).
// Columns are first sorted by content so tied optima are resolved the same
// way under any permutation of predicted ids; two bitwise-equal columns are
// interchangeable without affecting per-class scores.
std::vector<std::size_t> align_pred_to_true(const ContingencyTable& table) {
    const DenseMatrix counts = padded_counts(table);
    const std::size_t k = counts.rows();
    std::vector<std::size_t> order(k);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        for (std::size_t i = 0; i < k; ++i) {
            if (counts(i, a) != counts(i, b)) return counts(i, a) > counts(i, b);
        }
        return a < b;
    });
    DenseMatrix cost(k, k);
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = 0; j < k; ++j) cost(i, j) = -counts(i, order[j]);
    }
    // perm[true class] = canonical column; invert back to original columns.
    const std::vector<std::size_t> perm = hungarian_match(cost);
    std::vector<std::size_t> pred_to_true(k);
    for (std::size_t t = 0; t < k; ++t) pred_to_true[order[perm[t]]] = t;
    return pred_to_true;
}

}  // namespace

ContingencyTable ContingencyTable::build(const LabelVector& y_true, const LabelVector& y_pred) {
    check_lengths(y_true, y_pred, "contingency");
    std::size_t kt = 0, kp = 0;
    const auto t = compact_ids(y_true, &kt);
    const auto p = compact_ids(y_pred, &kp);
    ContingencyTable table;
    table.n = y_true.size();
    table.counts.assign(kt, std::vector<std::size_t>(kp, 0));
    table.true_marginals.assign(kt, 0);
    table.pred_marginals.assign(kp, 0);
    for (std::size_t i = 0; i < t.size(); ++i) {
        table.counts[t[i]][p[i]]++;
        table.true_marginals[t[i]]++;
        table.pred_marginals[p[i]]++;
    }
    return table;
}

std::vector<std::size_t> hungarian_match(const DenseMatrix& cost) {
    if (cost.rows() != cost.cols()) {
        throw std::invalid_argument("hungarian_match: cost must be square, got " +
                                    cost.shape_str());
    }
    if (!cost.all_finite()) {
        throw std::invalid_argument("hungarian_match: cost has non-finite entries");
    }
    const std::size_t n = cost.rows();
    const double kInf = std::numeric_limits<double>::infinity();
    // Potentials-based shortest augmenting path, 1-indexed over columns.
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
    std::vector<std::size_t> match(n + 1, 0);  // column -> row (1-indexed)
    std::vector<std::size_t> way(n + 1, 0);
    for (std::size_t i = 1; i <= n; ++i) {
        match[0] = i;
        std::size_t j0 = 0;
        std::vector<double> minv(n + 1, kInf);
        std::vector<char> used(n + 1, 0);
        do {
            used[j0] = 1;
            const std::size_t i0 = match[j0];
            double delta = kInf;
            std::size_t j1 = 0;
            for (std::size_t j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (std::size_t j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[match[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (match[j0] != 0);
        do {
            const std::size_t j1 = way[j0];
            match[j0] = match[j1];
            j0 = j1;
        } while (j0 != 0);
    }
    std::vector<std::size_t> perm(n);
    for (std::size_t j = 1; j <= n; ++j) perm[match[j] - 1] = j - 1;
    return perm;
}

double accuracy(const LabelVector& y_true, const LabelVector& y_pred) {
    check_lengths(y_true, y_pred, "accuracy");
    const auto table = ContingencyTable::build(y_true, y_pred);
    DenseMatrix counts = padded_counts(table);
    DenseMatrix cost(counts.rows(), counts.cols());
    for (std::size_t i = 0; i < counts.size(); ++i) cost.data()[i] = -counts.data()[i];
    const auto perm = hungarian_match(cost);
    double matched = 0.0;
    for (std::size_t t = 0; t < perm.size(); ++t) matched += counts(t, perm[t]);
    return matched / double(table.n);
}

double nmi(const LabelVector& y_true, const LabelVector& y_pred) {
    check_lengths(y_true, y_pred, "nmi");
    const auto table = ContingencyTable::build(y_true, y_pred);
    const double n = double(table.n);
    const double logn = std::log(n);
    // MI and entropies share the log-of-counts decomposition, so identical
    // partitions give exactly MI == H.
    double mi = 0.0;
    for (std::size_t i = 0; i < table.true_marginals.size(); ++i) {
        for (std::size_t j = 0; j < table.pred_marginals.size(); ++j) {
            const std::size_t nij = table.counts[i][j];
            if (nij == 0) continue;
            mi += double(nij) / n *
                  (std::log(double(nij)) - std::log(double(table.true_marginals[i])) -
                   std::log(double(table.pred_marginals[j])) + logn);
        }
    }
    auto entropy = [&](const std::vector<std::size_t>& marginals) {
        double h = 0.0;
        for (std::size_t m : marginals) {
            if (m == 0) continue;
            h += double(m) / n * (logn - std::log(double(m)));
        }
        return h;
    };
    if (mi <= 0.0) return 0.0;
    const double denom = 0.5 * (entropy(table.true_marginals) + entropy(table.pred_marginals));
    if (denom <= 0.0) return 0.0;
    return mi / denom;
}

double ari(const LabelVector& y_true, const LabelVector& y_pred) {
    check_lengths(y_true, y_pred, "ari");
    if (y_true.size() < 2) throw std::invalid_argument("ari: need n >= 2");
    const auto table = ContingencyTable::build(y_true, y_pred);
    auto choose2 = [](std::size_t m) { return double(m) * double(m - 1) / 2.0; };
    double sum_cells = 0.0, sum_true = 0.0, sum_pred = 0.0;
    for (const auto& row : table.counts) {
        for (std::size_t c : row) {
            if (c >= 2) sum_cells += choose2(c);
        }
    }
    for (std::size_t m : table.true_marginals) sum_true += choose2(m);
    for (std::size_t m : table.pred_marginals) sum_pred += choose2(m);
    const double total_pairs = choose2(table.n);
    const double expected = sum_true * sum_pred / total_pairs;
    const double max_index = 0.5 * (sum_true + sum_pred);
    if (max_index == expected) return 1.0;  // both partitions degenerate
    return (sum_cells - expected) / (max_index - expected);
}

double macro_f1(const LabelVector& y_true, const LabelVector& y_pred) {
    check_lengths(y_true, y_pred, "macro_f1");
    const auto table = ContingencyTable::build(y_true, y_pred);
    const auto pred_to_true = align_pred_to_true(table);
    const std::size_t kt = table.true_marginals.size();
    const std::size_t kp = table.pred_marginals.size();
    // tp/fp/fn per (aligned) true class; padded phantom classes are skipped.
    std::vector<double> tp(kt, 0.0), predicted(kt, 0.0);
    for (std::size_t j = 0; j < kp; ++j) {
        const std::size_t cls = pred_to_true[j];
        if (cls >= kt) continue;  // mapped to a padding class
        predicted[cls] += double(table.pred_marginals[j]);
        tp[cls] += double(table.counts[cls][j]);
    }
    double f1_sum = 0.0;
    for (std::size_t cls = 0; cls < kt; ++cls) {
        const double actual = double(table.true_marginals[cls]);
        const double precision = predicted[cls] > 0.0 ? tp[cls] / predicted[cls] : 0.0;
        const double recall = actual > 0.0 ? tp[cls] / actual : 0.0;
        if (precision + recall > 0.0) {
            f1_sum += 2.0 * precision * recall / (precision + recall);
        }
    }
    return f1_sum / double(kt);
}

}  // namespace caegcn
