#include "caegcn/selfsup.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "caegcn/rng.hpp"

namespace caegcn {

namespace {

double sq_dist_to(const DenseMatrix& points, std::size_t i, const double* center,
                  std::size_t d) {
    const double* p = points.row(i);
    double acc = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
        const double diff = p[j] - center[j];
        acc += diff * diff;
    }
    return acc;
}

}  // namespace

KmeansResult kmeans(const DenseMatrix& points, std::size_t c, std::size_t max_iters,
                    std::uint64_t seed) {
    const std::size_t n = points.rows(), d = points.cols();
    if (c < 1) throw std::invalid_argument("kmeans: need at least 1 cluster");
    if (n < c) {
        throw std::invalid_argument("kmeans: " + std::to_string(n) + " points < " +
                                    std::to_string(c) + " clusters");
    }
    if (max_iters < 1) throw std::invalid_argument("kmeans: max_iters must be >= 1");

    Rng rng(seed);
    KmeansResult res;
    res.centers = DenseMatrix(c, d);

    // k-means++ seeding.
    std::vector<double> dist2(n, std::numeric_limits<double>::infinity());
    std::size_t first = rng.uniform_index(n);
    std::copy(points.row(first), points.row(first) + d, res.centers.row(0));
    for (std::size_t k = 1; k < c; ++k) {
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double d2 = sq_dist_to(points, i, res.centers.row(k - 1), d);
            if (d2 < dist2[i]) dist2[i] = d2;
            total += dist2[i];
        }
        std::size_t pick;
        if (total > 0.0) {
            pick = rng.pick_weighted(dist2);
        } else {
            pick = rng.uniform_index(n);  // all points coincide with chosen centers
        }
        std::copy(points.row(pick), points.row(pick) + d, res.centers.row(k));
    }

    res.assignment.assign(n, c);  // sentinel forces one full update
    std::vector<std::size_t> counts(c);
    for (std::size_t iter = 0; iter < max_iters; ++iter) {
        bool changed = false;
        double inertia = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            std::size_t best = 0;
            double best_d2 = sq_dist_to(points, i, res.centers.row(0), d);
            for (std::size_t k = 1; k < c; ++k) {
                const double d2 = sq_dist_to(points, i, res.centers.row(k), d);
                if (d2 < best_d2) {
                    best_d2 = d2;
                    best = k;
                }
            }
            inertia += best_d2;
            if (res.assignment[i] != best) {
                res.assignment[i] = best;
                changed = true;
            }
        }
        res.inertia.push_back(inertia);
        if (!changed) break;

        res.centers.fill(0.0);
        std::fill(counts.begin(), counts.end(), 0);
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t k = res.assignment[i];
            counts[k]++;
            double* cr = res.centers.row(k);
            const double* pr = points.row(i);
            for (std::size_t j = 0; j < d; ++j) cr[j] += pr[j];
        }
        for (std::size_t k = 0; k < c; ++k) {
            if (counts[k] > 0) {
                double* cr = res.centers.row(k);
                for (std::size_t j = 0; j < d; ++j) cr[j] /= double(counts[k]);
            }
        }
        // Re-seed emptied clusters to the point farthest from its center.
        for (std::size_t k = 0; k < c; ++k) {
            if (counts[k] > 0) continue;
            std::size_t far = 0;
            double far_d2 = -1.0;
            for (std::size_t i = 0; i < n; ++i) {
                const double d2 =
                    sq_dist_to(points, i, res.centers.row(res.assignment[i]), d);
                if (d2 > far_d2) {
                    far_d2 = d2;
                    far = i;
                }
            }
            std::copy(points.row(far), points.row(far) + d, res.centers.row(k));
        }
    }
    return res;
}

DenseMatrix student_t_assign(const DenseMatrix& h_mid, const DenseMatrix& centers) {
    if (h_mid.cols() != centers.cols()) {
        throw std::invalid_argument("student_t_assign: points are " + h_mid.shape_str() +
                                    " but centers are " + centers.shape_str());
    }
    return student_t_rows(h_mid, centers);
}

DenseMatrix target_distribution(const DenseMatrix& t) {
    const std::size_t n = t.rows(), c = t.cols();
    std::vector<double> freq(c, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double* r = t.row(i);
        for (std::size_t k = 0; k < c; ++k) freq[k] += r[k];
    }
    for (std::size_t k = 0; k < c; ++k) {
        if (!(freq[k] > 0.0)) {
            throw std::runtime_error("target_distribution: cluster " + std::to_string(k) +
                                     " has zero total assignment (collapsed cluster)");
        }
    }
    DenseMatrix p(n, c);
    for (std::size_t i = 0; i < n; ++i) {
        const double* ti = t.row(i);
        double* pi = p.row(i);
        double sum = 0.0;
        for (std::size_t k = 0; k < c; ++k) {
            pi[k] = ti[k] * ti[k] / freq[k];
            sum += pi[k];
        }
        for (std::size_t k = 0; k < c; ++k) pi[k] /= sum;
    }
    return p;
}

double kl_divergence(const DenseMatrix& p, const DenseMatrix& q_dist) {
    return kl_sum_floored(p, q_dist);
}

DenseMatrix gae_soft_assign(const DenseMatrix& z_mid, std::size_t clusters) {
    if (z_mid.cols() != clusters) {
        throw std::invalid_argument("gae_soft_assign: middle width " +
                                    std::to_string(z_mid.cols()) +
                                    " must equal cluster count " + std::to_string(clusters));
    }
    return row_softmax(z_mid);
}

std::vector<std::size_t> hard_assign(const DenseMatrix& dist) {
    std::vector<std::size_t> labels(dist.rows());
    for (std::size_t i = 0; i < dist.rows(); ++i) {
        const double* r = dist.row(i);
        std::size_t best = 0;
        for (std::size_t j = 1; j < dist.cols(); ++j) {
            if (r[j] > r[best]) best = j;
        }
        labels[i] = best;
    }
    return labels;
}

LossBreakdown loss_terms(const DenseMatrix& x, const DenseMatrix& x_hat,
                         const DenseMatrix& z_last, const DenseMatrix& a_dense,
                         const DenseMatrix& a_tilde, const DenseMatrix& t,
                         const DenseMatrix& p, const DenseMatrix& z_dist, Ablation ablation) {
    LossBreakdown out;
    out.cae_content = 0.5 * frobenius_sq_diff(x, x_hat);
    out.gae_graph = frobenius_sq_diff(a_dense, a_tilde);
    out.gae_content = frobenius_sq_diff(x, z_last);
    out.cae_kl = kl_divergence(p, t);
    out.gae_kl = kl_divergence(p, z_dist);
    out.total = out.cae_content + out.cae_kl + out.gae_kl;
    if (ablation != Ablation::kNoGraphLoss) out.total += out.gae_graph;
    if (ablation != Ablation::kNoContentLoss) out.total += out.gae_content;
    return out;
}

}  // namespace caegcn
