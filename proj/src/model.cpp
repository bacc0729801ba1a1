#include "caegcn/model.hpp"

#include <stdexcept>

#include "caegcn/optim.hpp"
#include "caegcn/rng.hpp"

namespace caegcn {

Ablation parse_ablation(const std::string& tag) {
    if (tag == "full") return Ablation::kFull;
    if (tag == "no-attention") return Ablation::kNoAttention;
    if (tag == "no-graph-loss") return Ablation::kNoGraphLoss;
    if (tag == "no-content-loss") return Ablation::kNoContentLoss;
    throw std::invalid_argument("unknown ablation tag '" + tag +
                                "' (expected full|no-attention|no-graph-loss|no-content-loss)");
}

std::string to_string(Ablation ablation) {
    switch (ablation) {
        case Ablation::kFull: return "full";
        case Ablation::kNoAttention: return "no-attention";
        case Ablation::kNoGraphLoss: return "no-graph-loss";
        case Ablation::kNoContentLoss: return "no-content-loss";
    }
    return "?";
}

void ArchitectureSpec::validate() const {
    if (dims.size() < 3 || dims.size() % 2 == 0) {
        throw std::invalid_argument(
            "architecture: dims must list input, an odd-position middle, and output "
            "(even layer count), got " +
            std::to_string(dims.size()) + " entries");
    }
    for (std::size_t d : dims) {
        if (d == 0) throw std::invalid_argument("architecture: zero layer width");
    }
    if (dims.front() != dims.back()) {
        throw std::invalid_argument("architecture: output width " + std::to_string(dims.back()) +
                                    " must equal input width " + std::to_string(dims.front()));
    }
    if (clusters < 2) {
        throw std::invalid_argument("architecture: need at least 2 clusters");
    }
    if (middle_dim() != clusters) {
        throw std::invalid_argument("architecture: middle width " + std::to_string(middle_dim()) +
                                    " must equal cluster count " + std::to_string(clusters));
    }
    if (heads < 1) throw std::invalid_argument("architecture: need at least 1 head");
    if (!(gamma >= 0.0 && gamma <= 1.0)) {
        throw std::invalid_argument("architecture: gamma must be in [0,1], got " +
                                    std::to_string(gamma));
    }
}

ModelParams ModelParams::init(const ArchitectureSpec& spec, std::uint64_t seed) {
    spec.validate();
    Rng rng(seed);
    const std::size_t depth = spec.depth();
    ModelParams p;
    p.cae_w.reserve(depth);
    p.cae_b.reserve(depth);
    p.gae_w.reserve(depth);
    for (std::size_t l = 0; l < depth; ++l) {
        p.cae_w.push_back(xavier_init(spec.dims[l], spec.dims[l + 1], rng));
        p.cae_b.emplace_back(1, spec.dims[l + 1]);
    }
    for (std::size_t l = 0; l < depth; ++l) {
        p.gae_w.push_back(xavier_init(spec.dims[l], spec.dims[l + 1], rng));
    }
    p.attn_q.resize(depth - 1);
    p.attn_k.resize(depth - 1);
    p.attn_v.resize(depth - 1);
    p.attn_out.reserve(depth - 1);
    for (std::size_t fl = 0; fl < depth - 1; ++fl) {
        const std::size_t d = spec.dims[fl + 1];
        for (std::size_t m = 0; m < spec.heads; ++m) {
            p.attn_q[fl].push_back(xavier_init(d, d, rng));
            p.attn_k[fl].push_back(xavier_init(d, d, rng));
            p.attn_v[fl].push_back(xavier_init(d, d, rng));
        }
        p.attn_out.push_back(xavier_init(spec.heads * d, d, rng));
    }
    p.centers = DenseMatrix(spec.clusters, spec.middle_dim());
    return p;
}

std::vector<DenseMatrix*> ModelParams::trainable() {
    std::vector<DenseMatrix*> out = cae_trainable();
    for (auto& w : gae_w) out.push_back(&w);
    for (std::size_t fl = 0; fl < attn_out.size(); ++fl) {
        for (std::size_t m = 0; m < attn_q[fl].size(); ++m) {
            out.push_back(&attn_q[fl][m]);
            out.push_back(&attn_k[fl][m]);
            out.push_back(&attn_v[fl][m]);
        }
        out.push_back(&attn_out[fl]);
    }
    return out;
}

std::vector<DenseMatrix*> ModelParams::cae_trainable() {
    std::vector<DenseMatrix*> out;
    out.reserve(cae_w.size() * 2);
    for (auto& w : cae_w) out.push_back(&w);
    for (auto& b : cae_b) out.push_back(&b);
    return out;
}

namespace {

Var dense_layer(Tape& tape, Var input, Var w, Var b, bool relu_act) {
    Var pre = tape.add_bias_row(tape.matmul(input, w), b);
    return relu_act ? tape.relu(pre) : pre;
}

Var graph_layer(Tape& tape, const GraphFilter& filter, Var input, Var w, bool relu_act) {
    Var pre = tape.spmm(filter, tape.matmul(input, w));
    return relu_act ? tape.relu(pre) : pre;
}

Var fused_representation(Tape& tape, Var z, Var h, const ArchitectureSpec& spec,
                         const std::vector<Var>& wq, const std::vector<Var>& wk,
                         const std::vector<Var>& wv, Var w_out, bool use_attention,
                         std::vector<Var>* alphas_out) {
    Var y = tape.add(tape.scale(z, spec.gamma), tape.scale(h, 1.0 - spec.gamma));
    if (!use_attention) return y;
    std::vector<Var> heads;
    heads.reserve(spec.heads);
    for (std::size_t m = 0; m < spec.heads; ++m) {
        Var q = tape.matmul(y, wq[m]);
        Var k = tape.matmul(y, wk[m]);
        Var v = tape.matmul(y, wv[m]);
        Var alpha = tape.softmax_scores(q, k);
        if (alphas_out) alphas_out->push_back(alpha);
        heads.push_back(tape.matmul(alpha, v));
    }
    return tape.matmul(tape.concat_cols(heads), w_out);
}

}  // namespace

CaeVars forward_cae(Tape& tape, const DenseMatrix& x, const ModelParams& params,
                    const ArchitectureSpec& spec, std::vector<Var>* param_vars) {
    spec.validate();
    if (x.cols() != spec.dims.front()) {
        throw std::invalid_argument("forward: input is " + x.shape_str() + " but dims[0] is " +
                                    std::to_string(spec.dims.front()));
    }
    const std::size_t depth = spec.depth();
    std::vector<Var> w(depth), b(depth);
    for (std::size_t l = 0; l < depth; ++l) w[l] = tape.param(params.cae_w[l]);
    for (std::size_t l = 0; l < depth; ++l) b[l] = tape.param(params.cae_b[l]);
    if (param_vars) {
        param_vars->clear();
        param_vars->insert(param_vars->end(), w.begin(), w.end());
        param_vars->insert(param_vars->end(), b.begin(), b.end());
    }
    CaeVars out;
    out.h.resize(depth + 1);
    out.h[0] = tape.constant(x);
    for (std::size_t l = 1; l <= depth; ++l) {
        out.h[l] = dense_layer(tape, out.h[l - 1], w[l - 1], b[l - 1],
                               l < depth && l != spec.middle_layer());
    }
    out.x_hat = out.h[depth];
    out.h_mid = out.h[spec.middle_layer()];
    return out;
}

ForwardVars forward_model(Tape& tape, const DenseMatrix& x, const GraphFilter& filter,
                          const ModelParams& params, const ArchitectureSpec& spec,
                          Ablation ablation, std::vector<Var>* param_vars) {
    spec.validate();
    if (x.cols() != spec.dims.front()) {
        throw std::invalid_argument("forward: input is " + x.shape_str() + " but dims[0] is " +
                                    std::to_string(spec.dims.front()));
    }
    if (filter.n != x.rows()) {
        throw std::invalid_argument("forward: filter has " + std::to_string(filter.n) +
                                    " nodes but input has " + std::to_string(x.rows()) +
                                    " rows");
    }
    const std::size_t depth = spec.depth();
    const bool attention = ablation != Ablation::kNoAttention;

    std::vector<Var> cw(depth), cb(depth), gw(depth);
    std::vector<std::vector<Var>> aq(depth - 1), ak(depth - 1), av(depth - 1);
    std::vector<Var> aout(depth - 1);
    for (std::size_t l = 0; l < depth; ++l) cw[l] = tape.param(params.cae_w[l]);
    for (std::size_t l = 0; l < depth; ++l) cb[l] = tape.param(params.cae_b[l]);
    for (std::size_t l = 0; l < depth; ++l) gw[l] = tape.param(params.gae_w[l]);
    for (std::size_t fl = 0; fl < depth - 1; ++fl) {
        for (std::size_t m = 0; m < spec.heads; ++m) {
            aq[fl].push_back(tape.param(params.attn_q[fl][m]));
            ak[fl].push_back(tape.param(params.attn_k[fl][m]));
            av[fl].push_back(tape.param(params.attn_v[fl][m]));
        }
        aout[fl] = tape.param(params.attn_out[fl]);
    }
    if (param_vars) {
        param_vars->clear();
        param_vars->insert(param_vars->end(), cw.begin(), cw.end());
        param_vars->insert(param_vars->end(), cb.begin(), cb.end());
        param_vars->insert(param_vars->end(), gw.begin(), gw.end());
        for (std::size_t fl = 0; fl < depth - 1; ++fl) {
            for (std::size_t m = 0; m < spec.heads; ++m) {
                param_vars->push_back(aq[fl][m]);
                param_vars->push_back(ak[fl][m]);
                param_vars->push_back(av[fl][m]);
            }
            param_vars->push_back(aout[fl]);
        }
    }

    ForwardVars out;
    out.h.resize(depth + 1);
    out.z.resize(depth + 1);
    out.r.resize(depth);
    out.alphas.resize(depth - 1);

    // Hidden layers are ReLU except the middle clustering layer, which stays
    // linear so the self-supervision gradients can always reach it; the final
    // reconstruction layers are linear.
    const auto relu_at = [&](std::size_t l) { return l < depth && l != spec.middle_layer(); };
    out.h[0] = tape.constant(x);
    for (std::size_t l = 1; l <= depth; ++l) {
        out.h[l] = dense_layer(tape, out.h[l - 1], cw[l - 1], cb[l - 1], relu_at(l));
    }
    // First graph layer consumes the raw data rather than a fused input.
    out.z[1] = graph_layer(tape, filter, out.h[0], gw[0], relu_at(1));
    for (std::size_t l = 2; l <= depth; ++l) {
        const std::size_t fl = l - 2;
        out.r[l - 1] = fused_representation(tape, out.z[l - 1], out.h[l - 1], spec, aq[fl],
                                            ak[fl], av[fl], aout[fl], attention,
                                            &out.alphas[fl]);
        out.z[l] = graph_layer(tape, filter, out.r[l - 1], gw[l - 1], relu_at(l));
    }
    out.x_hat = out.h[depth];
    out.a_tilde = tape.sigmoid(tape.matmul_nt(out.z[depth], out.z[depth]));
    out.h_mid = out.h[spec.middle_layer()];
    out.z_mid = out.z[spec.middle_layer()];
    return out;
}

}  // namespace caegcn
