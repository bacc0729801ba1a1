#pragma once

#include <cstdint>
#include <vector>

#include "caegcn/matrix.hpp"
#include "caegcn/model.hpp"

namespace caegcn {

struct KmeansResult {
    DenseMatrix centers;                  // C x d
    std::vector<std::size_t> assignment;  // N
    std::vector<double> inertia;          // per Lloyd iteration, non-increasing
};

// Lloyd's algorithm with k-means++ seeding. Runs until assignments stop
// changing or `max_iters` is hit. An emptied cluster is re-seeded to the
// point farthest from its current center.
KmeansResult kmeans(const DenseMatrix& points, std::size_t c, std::size_t max_iters,
                    std::uint64_t seed);

// t(i,c) = (1+||h_i - centers_c||^2)^-1, row-normalized.
DenseMatrix student_t_assign(const DenseMatrix& h_mid, const DenseMatrix& centers);

// p(i,c) proportional to t(i,c)^2 / f_c with f_c the soft cluster frequency.
// Throws when a cluster's total assignment collapses to zero.
DenseMatrix target_distribution(const DenseMatrix& t);

// sum_ic p log(p/q) with 1e-12 floors inside the logs.
double kl_divergence(const DenseMatrix& p, const DenseMatrix& q_dist);

// Row softmax of the middle graph representation; its width must equal the
// cluster count.
DenseMatrix gae_soft_assign(const DenseMatrix& z_mid, std::size_t clusters);

// Row argmax; ties resolve to the smallest index.
std::vector<std::size_t> hard_assign(const DenseMatrix& dist);

struct LossBreakdown {
    double cae_content = 0.0;  // 1/2 ||X - Xhat||_F^2
    double gae_graph = 0.0;    // ||A - Atilde||_F^2
    double gae_content = 0.0;  // ||X - Z_L||_F^2
    double cae_kl = 0.0;       // KL(P || T)
    double gae_kl = 0.0;       // KL(P || Zdist)
    double total = 0.0;        // sum of the terms the ablation keeps
};

// All five loss terms plus the ablation-weighted total. `a_dense` is the raw
// adjacency (no self-loops) in dense form.
LossBreakdown loss_terms(const DenseMatrix& x, const DenseMatrix& x_hat,
                         const DenseMatrix& z_last, const DenseMatrix& a_dense,
                         const DenseMatrix& a_tilde, const DenseMatrix& t,
                         const DenseMatrix& p, const DenseMatrix& z_dist, Ablation ablation);

}  // namespace caegcn
