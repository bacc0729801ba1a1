#include "caegcn/tape.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace caegcn {

namespace {

DenseMatrix scalar_matrix(double v) {
    DenseMatrix m(1, 1);
    m(0, 0) = v;
    return m;
}

}  // namespace

Var Tape::push(Node node) {
    nodes_.push_back(std::move(node));
    return Var{int(nodes_.size()) - 1};
}

Tape::Node& Tape::at(Var v) {
    if (!v.valid() || v.id >= int(nodes_.size())) {
        throw std::invalid_argument("tape: invalid var handle");
    }
    return nodes_[std::size_t(v.id)];
}

const Tape::Node& Tape::at(Var v) const {
    if (!v.valid() || v.id >= int(nodes_.size())) {
        throw std::invalid_argument("tape: invalid var handle");
    }
    return nodes_[std::size_t(v.id)];
}

const DenseMatrix& Tape::value(Var v) const { return at(v).value; }

double Tape::scalar_value(Var v) const {
    const DenseMatrix& m = at(v).value;
    if (m.rows() != 1 || m.cols() != 1) {
        throw std::invalid_argument("scalar_value: node is " + m.shape_str());
    }
    return m(0, 0);
}

const DenseMatrix& Tape::grad(Var v) {
    Node& n = at(v);
    if (n.grad.empty()) n.grad = DenseMatrix(n.value.rows(), n.value.cols());
    return n.grad;
}

Var Tape::constant(DenseMatrix value) {
    Node n;
    n.value = std::move(value);
    return push(std::move(n));
}

Var Tape::param(DenseMatrix value) {
    Node n;
    n.value = std::move(value);
    n.requires_grad = true;
    return push(std::move(n));
}

Var Tape::matmul(Var a, Var b) {
    Node n;
    n.op = Op::kMatMul;
    n.value = caegcn::matmul(at(a).value, at(b).value);
    n.parents = {a.id, b.id};
    n.requires_grad = at(a).requires_grad || at(b).requires_grad;
    return push(std::move(n));
}

Var Tape::matmul_nt(Var a, Var b) {
    Node n;
    n.op = Op::kMatMulNT;
    n.value = caegcn::matmul_nt(at(a).value, at(b).value);
    n.parents = {a.id, b.id};
    n.requires_grad = at(a).requires_grad || at(b).requires_grad;
    return push(std::move(n));
}

Var Tape::spmm(const GraphFilter& filter, Var a) {
    Node n;
    n.op = Op::kSpMM;
    n.value = caegcn::spmm(filter, at(a).value);
    n.parents = {a.id};
    n.requires_grad = at(a).requires_grad;
    n.filter = &filter;
    return push(std::move(n));
}

Var Tape::add(Var a, Var b) {
    Node n;
    n.op = Op::kAdd;
    n.value = caegcn::add(at(a).value, at(b).value);
    n.parents = {a.id, b.id};
    n.requires_grad = at(a).requires_grad || at(b).requires_grad;
    return push(std::move(n));
}

Var Tape::sub(Var a, Var b) {
    Node n;
    n.op = Op::kSub;
    n.value = caegcn::sub(at(a).value, at(b).value);
    n.parents = {a.id, b.id};
    n.requires_grad = at(a).requires_grad || at(b).requires_grad;
    return push(std::move(n));
}

Var Tape::scale(Var a, double s) {
    Node n;
    n.op = Op::kScale;
    n.value = caegcn::scale(at(a).value, s);
    n.parents = {a.id};
    n.requires_grad = at(a).requires_grad;
    n.factor = s;
    return push(std::move(n));
}

Var Tape::add_bias_row(Var a, Var bias) {
    Node n;
    n.op = Op::kAddBiasRow;
    n.value = caegcn::add_bias_row(at(a).value, at(bias).value);
    n.parents = {a.id, bias.id};
    n.requires_grad = at(a).requires_grad || at(bias).requires_grad;
    return push(std::move(n));
}

Var Tape::relu(Var a) {
    Node n;
    n.op = Op::kRelu;
    n.value = caegcn::relu(at(a).value);
    n.parents = {a.id};
    n.requires_grad = at(a).requires_grad;
    return push(std::move(n));
}

Var Tape::sigmoid(Var a) {
    Node n;
    n.op = Op::kSigmoid;
    n.value = caegcn::sigmoid(at(a).value);
    n.parents = {a.id};
    n.requires_grad = at(a).requires_grad;
    return push(std::move(n));
}

Var Tape::row_softmax(Var a) {
    Node n;
    n.op = Op::kRowSoftmax;
    n.value = caegcn::row_softmax(at(a).value);
    n.parents = {a.id};
    n.requires_grad = at(a).requires_grad;
    return push(std::move(n));
}

Var Tape::softmax_scores(Var q, Var k) {
    Node n;
    n.op = Op::kSoftmaxScores;
    n.value = caegcn::row_softmax(caegcn::matmul_nt(at(q).value, at(k).value));
    n.parents = {q.id, k.id};
    n.requires_grad = at(q).requires_grad || at(k).requires_grad;
    return push(std::move(n));
}

Var Tape::concat_cols(const std::vector<Var>& parts) {
    if (parts.empty()) throw std::invalid_argument("concat_cols: no inputs");
    std::vector<const DenseMatrix*> mats;
    mats.reserve(parts.size());
    Node n;
    n.op = Op::kConcatCols;
    for (Var p : parts) {
        mats.push_back(&at(p).value);
        n.parents.push_back(p.id);
        n.requires_grad = n.requires_grad || at(p).requires_grad;
    }
    n.value = caegcn::concat_cols(mats);
    return push(std::move(n));
}

Var Tape::student_t(Var h, DenseMatrix centers) {
    Node n;
    n.op = Op::kStudentT;
    n.value = caegcn::student_t_rows(at(h).value, centers);
    n.parents = {h.id};
    n.requires_grad = at(h).requires_grad;
    n.aux = std::move(centers);
    return push(std::move(n));
}

Var Tape::frobenius_sq(Var a) {
    Node n;
    n.op = Op::kFrobSqDiff;
    const DenseMatrix& v = at(a).value;
    n.value = scalar_matrix(caegcn::frobenius_sq_diff(v, DenseMatrix(v.rows(), v.cols())));
    n.parents = {a.id};
    n.requires_grad = at(a).requires_grad;
    return push(std::move(n));  // empty aux means a zero target
}

Var Tape::frobenius_sq_diff(Var a, DenseMatrix target) {
    Node n;
    n.op = Op::kFrobSqDiff;
    n.value = scalar_matrix(caegcn::frobenius_sq_diff(at(a).value, target));
    n.parents = {a.id};
    n.requires_grad = at(a).requires_grad;
    n.aux = std::move(target);
    return push(std::move(n));
}

Var Tape::kl_to_target(DenseMatrix p, Var q) {
    Node n;
    n.op = Op::kKlToTarget;
    n.value = scalar_matrix(caegcn::kl_sum_floored(p, at(q).value));
    n.parents = {q.id};
    n.requires_grad = at(q).requires_grad;
    n.aux = std::move(p);
    return push(std::move(n));
}

Var Tape::weighted_sum(Var a, DenseMatrix w) {
    check_same_shape("weighted_sum", at(a).value, w);
    double acc = 0.0;
    const DenseMatrix& v = at(a).value;
    for (std::size_t i = 0; i < v.size(); ++i) acc += v.data()[i] * w.data()[i];
    Node n;
    n.op = Op::kWeightedSum;
    n.value = scalar_matrix(acc);
    n.parents = {a.id};
    n.requires_grad = at(a).requires_grad;
    n.aux = std::move(w);
    return push(std::move(n));
}

DenseMatrix& Tape::grad_buffer(int id) {
    Node& n = nodes_[std::size_t(id)];
    if (n.grad.empty()) n.grad = DenseMatrix(n.value.rows(), n.value.cols());
    return n.grad;
}

void Tape::backward(Var loss) {
    Node& top = at(loss);
    if (top.value.rows() != 1 || top.value.cols() != 1) {
        throw std::invalid_argument("backward: loss must be 1x1, got " + top.value.shape_str());
    }
    grad_buffer(loss.id)(0, 0) += 1.0;
    for (int id = loss.id; id >= 0; --id) {
        Node& n = nodes_[std::size_t(id)];
        if (!n.requires_grad || n.grad.empty()) continue;
        backward_node(id);
        if (n.op != Op::kLeaf) n.grad.release();
    }
}

void Tape::backward_node(int id) {
    Node& n = nodes_[std::size_t(id)];
    const DenseMatrix& g = n.grad;
    auto wants = [&](int pidx) { return nodes_[std::size_t(n.parents[std::size_t(pidx)])].requires_grad; };
    auto pval = [&](int pidx) -> const DenseMatrix& {
        return nodes_[std::size_t(n.parents[std::size_t(pidx)])].value;
    };
    auto pgrad = [&](int pidx) -> DenseMatrix& { return grad_buffer(n.parents[std::size_t(pidx)]); };

    switch (n.op) {
        case Op::kLeaf:
            break;
        case Op::kMatMul:
            if (wants(0)) matmul_nt_acc(pgrad(0), g, pval(1));
            if (wants(1)) matmul_tn_acc(pgrad(1), pval(0), g);
            break;
        case Op::kMatMulNT:
            if (wants(0)) matmul_acc(pgrad(0), g, pval(1));
            if (wants(1)) matmul_tn_acc(pgrad(1), g, pval(0));
            break;
        case Op::kSpMM:
            // The filter is symmetric, so F^T g = F g.
            if (wants(0)) spmm_acc(pgrad(0), *n.filter, g);
            break;
        case Op::kAdd:
            if (wants(0)) add_scaled_inplace(pgrad(0), g, 1.0);
            if (wants(1)) add_scaled_inplace(pgrad(1), g, 1.0);
            break;
        case Op::kSub:
            if (wants(0)) add_scaled_inplace(pgrad(0), g, 1.0);
            if (wants(1)) add_scaled_inplace(pgrad(1), g, -1.0);
            break;
        case Op::kScale:
            if (wants(0)) add_scaled_inplace(pgrad(0), g, n.factor);
            break;
        case Op::kAddBiasRow: {
            if (wants(0)) add_scaled_inplace(pgrad(0), g, 1.0);
            if (wants(1)) {
                DenseMatrix& db = pgrad(1);
                for (std::size_t i = 0; i < g.rows(); ++i) {
                    const double* gr = g.row(i);
                    for (std::size_t j = 0; j < g.cols(); ++j) db(0, j) += gr[j];
                }
            }
            break;
        }
        case Op::kRelu: {
            if (!wants(0)) break;
            DenseMatrix& da = pgrad(0);
            for (std::size_t i = 0; i < g.size(); ++i) {
                if (n.value.data()[i] > 0.0) da.data()[i] += g.data()[i];
            }
            break;
        }
        case Op::kSigmoid: {
            if (!wants(0)) break;
            DenseMatrix& da = pgrad(0);
            for (std::size_t i = 0; i < g.size(); ++i) {
                const double y = n.value.data()[i];
                da.data()[i] += g.data()[i] * y * (1.0 - y);
            }
            break;
        }
        case Op::kRowSoftmax: {
            if (!wants(0)) break;
            DenseMatrix& da = pgrad(0);
            for (std::size_t i = 0; i < g.rows(); ++i) {
                const double* y = n.value.row(i);
                const double* gr = g.row(i);
                double dot = 0.0;
                for (std::size_t j = 0; j < g.cols(); ++j) dot += gr[j] * y[j];
                double* dr = da.row(i);
                for (std::size_t j = 0; j < g.cols(); ++j) dr[j] += y[j] * (gr[j] - dot);
            }
            break;
        }
        case Op::kSoftmaxScores: {
            // ds = softmax-backward(alpha, g); dq += ds * k; dk += ds^T * q.
            DenseMatrix ds(g.rows(), g.cols());
            for (std::size_t i = 0; i < g.rows(); ++i) {
                const double* y = n.value.row(i);
                const double* gr = g.row(i);
                double dot = 0.0;
                for (std::size_t j = 0; j < g.cols(); ++j) dot += gr[j] * y[j];
                double* dr = ds.row(i);
                for (std::size_t j = 0; j < g.cols(); ++j) dr[j] = y[j] * (gr[j] - dot);
            }
            if (wants(0)) matmul_acc(pgrad(0), ds, pval(1));
            if (wants(1)) matmul_tn_acc(pgrad(1), ds, pval(0));
            break;
        }
        case Op::kConcatCols: {
            std::size_t off = 0;
            for (std::size_t p = 0; p < n.parents.size(); ++p) {
                const std::size_t w = pval(int(p)).cols();
                if (wants(int(p))) {
                    DenseMatrix& dp = pgrad(int(p));
                    for (std::size_t i = 0; i < g.rows(); ++i) {
                        const double* gr = g.row(i) + off;
                        double* dr = dp.row(i);
                        for (std::size_t j = 0; j < w; ++j) dr[j] += gr[j];
                    }
                }
                off += w;
            }
            break;
        }
        case Op::kStudentT: {
            if (!wants(0)) break;
            const DenseMatrix& h = pval(0);
            const DenseMatrix& centers = n.aux;
            const DenseMatrix& t = n.value;
            DenseMatrix& dh = pgrad(0);
            const std::size_t rows = h.rows(), c = centers.rows(), d = h.cols();
            for (std::size_t i = 0; i < rows; ++i) {
                const double* hi = h.row(i);
                const double* gi = g.row(i);
                const double* ti = t.row(i);
                double* dhi = dh.row(i);
                // Recompute the unnormalized kernels u and their row sum.
                double srow = 0.0;
                std::vector<double> u(c);
                for (std::size_t cc = 0; cc < c; ++cc) {
                    const double* bc = centers.row(cc);
                    double d2 = 0.0;
                    for (std::size_t j = 0; j < d; ++j) {
                        const double diff = hi[j] - bc[j];
                        d2 += diff * diff;
                    }
                    u[cc] = 1.0 / (1.0 + d2);
                    srow += u[cc];
                }
                double gbar = 0.0;
                for (std::size_t cc = 0; cc < c; ++cc) gbar += gi[cc] * ti[cc];
                for (std::size_t cc = 0; cc < c; ++cc) {
                    const double* bc = centers.row(cc);
                    const double coeff = 2.0 / srow * (gbar - gi[cc]) * u[cc] * u[cc];
                    for (std::size_t j = 0; j < d; ++j) {
                        dhi[j] += coeff * (hi[j] - bc[j]);
                    }
                }
            }
            break;
        }
        case Op::kFrobSqDiff: {
            if (!wants(0)) break;
            const double gs = g(0, 0);
            const DenseMatrix& a = pval(0);
            DenseMatrix& da = pgrad(0);
            if (n.aux.empty()) {
                for (std::size_t i = 0; i < a.size(); ++i) {
                    da.data()[i] += gs * 2.0 * a.data()[i];
                }
            } else {
                for (std::size_t i = 0; i < a.size(); ++i) {
                    da.data()[i] += gs * 2.0 * (a.data()[i] - n.aux.data()[i]);
                }
            }
            break;
        }
        case Op::kKlToTarget: {
            if (!wants(0)) break;
            const double gs = g(0, 0);
            const DenseMatrix& q = pval(0);
            const DenseMatrix& p = n.aux;
            DenseMatrix& dq = pgrad(0);
            for (std::size_t i = 0; i < q.size(); ++i) {
                // Below the floor the log argument is clamped; no gradient.
                if (q.data()[i] > kLogFloor && p.data()[i] != 0.0) {
                    dq.data()[i] -= gs * p.data()[i] / q.data()[i];
                }
            }
            break;
        }
        case Op::kWeightedSum: {
            if (!wants(0)) break;
            add_scaled_inplace(pgrad(0), n.aux, g(0, 0));
            break;
        }
    }
}

}  // namespace caegcn
