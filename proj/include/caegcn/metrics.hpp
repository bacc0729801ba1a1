#pragma once

#include <cstddef>
#include <vector>

#include "caegcn/matrix.hpp"

namespace caegcn {

using LabelVector = std::vector<std::size_t>;

// Co-occurrence counts between two labelings over compacted id spaces.
struct ContingencyTable {
    std::vector<std::vector<std::size_t>> counts;  // [true class][pred cluster]
    std::vector<std::size_t> true_marginals;
    std::vector<std::size_t> pred_marginals;
    std::size_t n = 0;

    static ContingencyTable build(const LabelVector& y_true, const LabelVector& y_pred);
};

// Minimum-cost perfect assignment on a square cost matrix (Kuhn-Munkres).
// Returns perm with row i assigned to column perm[i].
std::vector<std::size_t> hungarian_match(const DenseMatrix& cost);

// Fraction correct under the best one-to-one relabeling of predicted ids.
double accuracy(const LabelVector& y_true, const LabelVector& y_pred);

// Mutual information normalized by the arithmetic mean of the entropies;
// zero MI maps to 0.
double nmi(const LabelVector& y_true, const LabelVector& y_pred);

// Adjusted Rand index from pair counts.
double ari(const LabelVector& y_true, const LabelVector& y_pred);

// Macro-averaged F1 over true classes, computed after Hungarian alignment of
// predicted clusters to classes.
double macro_f1(const LabelVector& y_true, const LabelVector& y_pred);

}  // namespace caegcn
