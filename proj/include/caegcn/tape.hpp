#pragma once

#include <cstddef>
#include <vector>

#include "caegcn/matrix.hpp"
#include "caegcn/sparse.hpp"

namespace caegcn {

// Handle into a Tape node.
struct Var {
    int id = -1;
    bool valid() const { return id >= 0; }
};

// Define-by-run reverse-mode autodiff over DenseMatrix values. The tape is
// rebuilt every training iteration; insertion order is the topological order.
//
// Gradients of interior nodes are released as soon as backward has consumed
// them; after backward() only leaf gradients remain readable.
class Tape {
public:
    enum class Op {
        kLeaf,
        kMatMul,         // a * b
        kMatMulNT,       // a * b^T
        kSpMM,           // filter * a
        kAdd,
        kSub,
        kScale,          // s * a
        kAddBiasRow,     // a + ones * bias
        kRelu,
        kSigmoid,
        kRowSoftmax,
        kSoftmaxScores,  // row_softmax(q * k^T), fused to keep one NxN buffer
        kConcatCols,
        kStudentT,       // student_t_rows(h, centers); centers held constant
        kFrobSqDiff,     // sum (a - target)^2 -> 1x1
        kKlToTarget,     // sum p log(p/q) with floors, p constant -> 1x1
        kWeightedSum,    // sum w .* a -> 1x1
    };

    Var constant(DenseMatrix value);
    Var param(DenseMatrix value);

    Var matmul(Var a, Var b);
    Var matmul_nt(Var a, Var b);
    // `filter` must outlive the tape.
    Var spmm(const GraphFilter& filter, Var a);
    Var add(Var a, Var b);
    Var sub(Var a, Var b);
    Var scale(Var a, double s);
    Var add_bias_row(Var a, Var bias);
    Var relu(Var a);
    Var sigmoid(Var a);
    Var row_softmax(Var a);
    Var softmax_scores(Var q, Var k);
    Var concat_cols(const std::vector<Var>& parts);
    Var student_t(Var h, DenseMatrix centers);
    Var frobenius_sq(Var a);
    Var frobenius_sq_diff(Var a, DenseMatrix target);
    Var kl_to_target(DenseMatrix p, Var q);
    Var weighted_sum(Var a, DenseMatrix w);

    // Seeds d(loss)/d(loss) = 1 and sweeps the tape in reverse. `loss` must be
    // 1x1. Params unreachable from the loss end up with zero gradients.
    void backward(Var loss);

    const DenseMatrix& value(Var v) const;
    double scalar_value(Var v) const;
    // Valid for leaves (and, before backward, any node); zero-filled if the
    // node was never reached.
    const DenseMatrix& grad(Var v);

    std::size_t size() const { return nodes_.size(); }

private:
    struct Node {
        Op op = Op::kLeaf;
        DenseMatrix value;
        DenseMatrix grad;
        std::vector<int> parents;
        bool requires_grad = false;
        double factor = 0.0;            // kScale
        DenseMatrix aux;                // op-specific constant (target, centers, weights)
        const GraphFilter* filter = nullptr;
    };

    Var push(Node node);
    Node& at(Var v);
    const Node& at(Var v) const;
    DenseMatrix& grad_buffer(int id);
    void backward_node(int id);

    std::vector<Node> nodes_;
};

}  // namespace caegcn
