#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "caegcn/matrix.hpp"
#include "caegcn/sparse.hpp"
#include "caegcn/tape.hpp"

namespace caegcn {

enum class Ablation { kFull, kNoAttention, kNoGraphLoss, kNoContentLoss };

Ablation parse_ablation(const std::string& tag);
std::string to_string(Ablation ablation);

// Layer-dimension plan shared by the content and graph stacks. `dims` holds
// L+1 entries: input, L-1 hidden widths, output (= input). The middle width
// dims[L/2] carries the clustering embedding and must equal `clusters`.
struct ArchitectureSpec {
    std::vector<std::size_t> dims;
    std::size_t clusters = 0;
    std::size_t heads = 8;
    double gamma = 0.5;

    std::size_t depth() const { return dims.size() - 1; }          // L
    std::size_t middle_layer() const { return depth() / 2; }       // L/2
    std::size_t middle_dim() const { return dims[middle_layer()]; }

    void validate() const;
};

// Every learnable weight. Cluster centers are set once from K-means and are
// not part of the trainable set.
struct ModelParams {
    std::vector<DenseMatrix> cae_w;  // [L], layer l+1 maps dims[l] -> dims[l+1]
    std::vector<DenseMatrix> cae_b;  // [L], 1 x dims[l+1]
    std::vector<DenseMatrix> gae_w;  // [L]
    // Fusion layers l = 1..L-1 (index l-1): per-head projections and the
    // concat output projection.
    std::vector<std::vector<DenseMatrix>> attn_q;  // [L-1][M], dims[l] x dims[l]
    std::vector<std::vector<DenseMatrix>> attn_k;
    std::vector<std::vector<DenseMatrix>> attn_v;
    std::vector<DenseMatrix> attn_out;             // [L-1], (M*dims[l]) x dims[l]
    DenseMatrix centers;                           // C x dims[L/2]

    // Xavier weights, zero biases, zero centers.
    static ModelParams init(const ArchitectureSpec& spec, std::uint64_t seed);

    // Canonical parameter orders used to pair values with tape vars and
    // optimizer slots.
    std::vector<DenseMatrix*> trainable();
    std::vector<DenseMatrix*> cae_trainable();
};

// Tape handles produced by a forward pass.
struct ForwardVars {
    std::vector<Var> h;       // h[0] = X (constant), h[1..L]
    std::vector<Var> z;       // z[1..L]; z[0] unused
    std::vector<Var> r;       // r[1..L-1] fused representations; r[0] unused
    std::vector<std::vector<Var>> alphas;  // [L-1][M] attention weight matrices
    Var x_hat;
    Var a_tilde;
    Var h_mid;
    Var z_mid;
};

struct CaeVars {
    std::vector<Var> h;
    Var x_hat;
    Var h_mid;
};

// Registers the CAE weights on the tape and runs the content stack alone.
// `param_vars` (if non-null) receives vars aligned with cae_trainable().
CaeVars forward_cae(Tape& tape, const DenseMatrix& x, const ModelParams& params,
                    const ArchitectureSpec& spec, std::vector<Var>* param_vars);

// Full forward pass: CAE stack, GAE stack, and per-layer fusion. Under
// kNoAttention the fused representation is the plain convex combination.
// `param_vars` (if non-null) receives vars aligned with trainable().
ForwardVars forward_model(Tape& tape, const DenseMatrix& x, const GraphFilter& filter,
                          const ModelParams& params, const ArchitectureSpec& spec,
                          Ablation ablation, std::vector<Var>* param_vars);

}  // namespace caegcn
