#include <doctest.h>

#include <stdexcept>

#include <cmath>

#include "caegcn/graph_build.hpp"
#include "caegcn/model.hpp"
#include "caegcn/rng.hpp"
#include "caegcn/selfsup.hpp"
#include "caegcn/tape.hpp"
#include "support/oracles.hpp"

using namespace caegcn;
using caegcn::testing::random_matrix;

namespace {

ArchitectureSpec small_spec(std::size_t input_dim, std::size_t heads = 2, double gamma = 0.5) {
    ArchitectureSpec spec;
    spec.dims = {input_dim, 5, 4, 2, 4, 5, input_dim};
    spec.clusters = 2;
    spec.heads = heads;
    spec.gamma = gamma;
    return spec;
}

SparseGraph ring_graph(std::size_t n) {
    std::vector<std::pair<std::size_t, std::size_t>> edges;
    for (std::size_t i = 0; i < n; ++i) edges.emplace_back(i, (i + 1) % n);
    return SparseGraph::from_edges(n, edges);
}

GraphFilter ring_filter(std::size_t n) { return normalize_filter(ring_graph(n)); }

}  // namespace

TEST_CASE("ablation tags round-trip and unknown tags are rejected") {
    CHECK(parse_ablation("full") == Ablation::kFull);
    CHECK(parse_ablation("no-attention") == Ablation::kNoAttention);
    CHECK(parse_ablation("no-graph-loss") == Ablation::kNoGraphLoss);
    CHECK(parse_ablation("no-content-loss") == Ablation::kNoContentLoss);
    for (auto a : {Ablation::kFull, Ablation::kNoAttention, Ablation::kNoGraphLoss,
                   Ablation::kNoContentLoss}) {
        CHECK(parse_ablation(to_string(a)) == a);
    }
    CHECK_THROWS_AS(parse_ablation("none"), std::invalid_argument);
}

TEST_CASE("architecture validation rejects malformed plans") {
    ArchitectureSpec spec = small_spec(6);
    CHECK_NOTHROW(spec.validate());

    SUBCASE("odd layer count") {
        spec.dims = {6, 5, 2, 5, 4, 6};
        CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
    }
    SUBCASE("output width differs from input") {
        spec.dims.back() = 7;
        CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
    }
    SUBCASE("middle width not the cluster count") {
        spec.clusters = 3;
        CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
    }
    SUBCASE("zero heads") {
        spec.heads = 0;
        CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
    }
    SUBCASE("gamma outside [0,1]") {
        spec.gamma = 1.5;
        CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
    }
}

TEST_CASE("content layer anchor: relu(2*3 - 1) = 5") {
    Tape tape;
    const Var h = tape.constant(DenseMatrix::from_rows({{2}}));
    const Var w = tape.constant(DenseMatrix::from_rows({{3}}));
    const Var b = tape.constant(DenseMatrix::from_rows({{-1}}));
    const Var out = tape.relu(tape.add_bias_row(tape.matmul(h, w), b));
    CHECK(tape.value(out)(0, 0) == 5.0);
}

TEST_CASE("graph layer anchor on the two-node complete graph") {
    const GraphFilter f = normalize_filter(SparseGraph::from_edges(2, {{0, 1}}));
    Tape tape;
    const Var r = tape.constant(DenseMatrix::from_rows({{2}, {4}}));
    const Var u = tape.constant(DenseMatrix::from_rows({{1}}));
    const Var z = tape.spmm(f, tape.matmul(r, u));
    CHECK(tape.value(z)(0, 0) == doctest::Approx(3.0).epsilon(1e-14));
    CHECK(tape.value(z)(1, 0) == doctest::Approx(3.0).epsilon(1e-14));
}

TEST_CASE("attention head anchors") {
    SUBCASE("a single sample attends only to itself") {
        Tape tape;
        const Var y = tape.constant(DenseMatrix::from_rows({{1.5, -2}}));
        const Var alpha = tape.softmax_scores(y, y);
        CHECK(tape.value(alpha)(0, 0) == 1.0);
        const Var r = tape.matmul(alpha, y);
        CHECK(tape.value(r)(0, 0) == 1.5);
        CHECK(tape.value(r)(0, 1) == -2.0);
    }
    SUBCASE("zero queries average the values") {
        // W^q = 0 forces uniform attention; V rows (1) and (3) average to 2.
        Tape tape;
        const Var q = tape.constant(DenseMatrix(2, 1, 0.0));
        const Var k = tape.constant(DenseMatrix::from_rows({{0.3}, {-1.2}}));
        const Var v = tape.constant(DenseMatrix::from_rows({{1}, {3}}));
        const Var r = tape.matmul(tape.softmax_scores(q, k), v);
        CHECK(tape.value(r)(0, 0) == doctest::Approx(2.0).epsilon(1e-14));
        CHECK(tape.value(r)(1, 0) == doctest::Approx(2.0).epsilon(1e-14));
    }
    SUBCASE("identical keys give uniform rows and column means") {
        Rng rng(3);
        Tape tape;
        const Var q = tape.constant(random_matrix(rng, 4, 3));
        const Var k = tape.constant(DenseMatrix(4, 3, 0.7));  // all rows identical
        const DenseMatrix vmat = random_matrix(rng, 4, 3);
        const Var v = tape.constant(vmat);
        const Var alpha = tape.softmax_scores(q, k);
        const Var r = tape.matmul(alpha, v);
        for (std::size_t i = 0; i < 4; ++i) {
            for (std::size_t j = 0; j < 4; ++j) {
                CHECK(tape.value(alpha)(i, j) == doctest::Approx(0.25).epsilon(1e-12));
            }
            for (std::size_t c = 0; c < 3; ++c) {
                double mean = 0.0;
                for (std::size_t row = 0; row < 4; ++row) mean += vmat(row, c);
                mean /= 4.0;
                CHECK(tape.value(r)(i, c) == doctest::Approx(mean).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("adjacency reconstruction from orthonormal rows") {
    Tape tape;
    const Var z = tape.constant(DenseMatrix::from_rows({{1, 0}, {0, 1}}));
    const Var a = tape.sigmoid(tape.matmul_nt(z, z));
    const double diag = 1.0 / (1.0 + std::exp(-1.0));
    CHECK(tape.value(a)(0, 0) == doctest::Approx(diag).epsilon(1e-12));
    CHECK(tape.value(a)(0, 1) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(tape.value(a)(1, 0) == tape.value(a)(0, 1));
}

TEST_CASE("forward obeys the per-layer shape contract") {
    const std::size_t n = 6;
    const ArchitectureSpec spec = small_spec(7, 3);
    const ModelParams params = ModelParams::init(spec, 77);
    Rng rng(8);
    const DenseMatrix x = random_matrix(rng, n, 7);
    const GraphFilter filter = ring_filter(n);
    Tape tape;
    const ForwardVars fw = forward_model(tape, x, filter, params, spec, Ablation::kFull, nullptr);
    for (std::size_t l = 1; l <= spec.depth(); ++l) {
        CHECK(tape.value(fw.h[l]).rows() == n);
        CHECK(tape.value(fw.h[l]).cols() == spec.dims[l]);
        CHECK(tape.value(fw.z[l]).rows() == n);
        CHECK(tape.value(fw.z[l]).cols() == spec.dims[l]);
        if (l < spec.depth()) {
            CHECK(tape.value(fw.r[l]).rows() == n);
            CHECK(tape.value(fw.r[l]).cols() == spec.dims[l]);
        }
    }
    const DenseMatrix& at = tape.value(fw.a_tilde);
    CHECK(at.rows() == n);
    CHECK(at.cols() == n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            CHECK(at(i, j) > 0.0);
            CHECK(at(i, j) < 1.0);
            CHECK(at(i, j) == at(j, i));
        }
    }
    CHECK(fw.alphas.size() == spec.depth() - 1);
    for (const auto& layer : fw.alphas) {
        CHECK(layer.size() == spec.heads);
        for (Var alpha : layer) {
            const DenseMatrix& a = tape.value(alpha);
            for (std::size_t i = 0; i < a.rows(); ++i) {
                double sum = 0.0;
                for (std::size_t j = 0; j < a.cols(); ++j) sum += a(i, j);
                CHECK(std::abs(sum - 1.0) < 1e-12);
            }
        }
    }
}

TEST_CASE("one head with an identity output projection is the bare head") {
    ArchitectureSpec spec;
    spec.dims = {4, 6, 6, 2, 6, 6, 4};
    spec.clusters = 2;
    spec.heads = 1;
    ModelParams params = ModelParams::init(spec, 17);
    // Identity W_out on the first fusion layer (M = 1 keeps it square).
    params.attn_out[0].fill(0.0);
    for (std::size_t i = 0; i < 6; ++i) params.attn_out[0](i, i) = 1.0;
    Rng rng(4);
    const DenseMatrix x = random_matrix(rng, 5, 4);
    const GraphFilter filter = ring_filter(5);
    Tape tape;
    const ForwardVars fw = forward_model(tape, x, filter, params, spec, Ablation::kFull, nullptr);

    // Bare head computed from the same fused input.
    const Var y = tape.add(tape.scale(fw.z[1], spec.gamma), tape.scale(fw.h[1], 1.0 - spec.gamma));
    const Var q = tape.matmul(y, tape.constant(params.attn_q[0][0]));
    const Var k = tape.matmul(y, tape.constant(params.attn_k[0][0]));
    const Var v = tape.matmul(y, tape.constant(params.attn_v[0][0]));
    const Var head = tape.matmul(tape.softmax_scores(q, k), v);
    const DenseMatrix& got = tape.value(fw.r[1]);
    const DenseMatrix& want = tape.value(head);
    for (std::size_t i = 0; i < got.size(); ++i) {
        CHECK(got.data()[i] == doctest::Approx(want.data()[i]).epsilon(1e-14));
    }
}

TEST_CASE("multi-head concat width follows heads x layer width") {
    ArchitectureSpec spec;
    spec.dims = {4, 10, 10, 2, 10, 10, 4};
    spec.clusters = 2;
    spec.heads = 8;
    const ModelParams params = ModelParams::init(spec, 5);
    CHECK(params.attn_out[0].rows() == 80);
    CHECK(params.attn_out[0].cols() == 10);
    Rng rng(6);
    const DenseMatrix x = random_matrix(rng, 4, 4);
    Tape tape;
    const ForwardVars fw =
        forward_model(tape, x, ring_filter(4), params, spec, Ablation::kFull, nullptr);
    CHECK(tape.value(fw.r[1]).rows() == 4);
    CHECK(tape.value(fw.r[1]).cols() == 10);
}

TEST_CASE("all-zero weights annihilate the hidden stacks") {
    const ArchitectureSpec spec = small_spec(3);
    ModelParams params = ModelParams::init(spec, 1);
    for (auto* p : params.trainable()) p->fill(0.0);
    // A recognizable final bias should surface as the reconstruction.
    params.cae_b.back() = DenseMatrix::from_rows({{0.25, -0.5, 4.0}});
    Rng rng(2);
    const DenseMatrix x = random_matrix(rng, 5, 3);
    Tape tape;
    const ForwardVars fw =
        forward_model(tape, x, ring_filter(5), params, spec, Ablation::kFull, nullptr);
    for (std::size_t l = 1; l < spec.depth(); ++l) {
        const DenseMatrix& h = tape.value(fw.h[l]);
        for (std::size_t i = 0; i < h.size(); ++i) CHECK(h.data()[i] == 0.0);
    }
    const DenseMatrix& xh = tape.value(fw.x_hat);
    for (std::size_t i = 0; i < xh.rows(); ++i) {
        CHECK(xh(i, 0) == 0.25);
        CHECK(xh(i, 1) == -0.5);
        CHECK(xh(i, 2) == 4.0);
    }
    const DenseMatrix& at = tape.value(fw.a_tilde);
    for (std::size_t i = 0; i < at.size(); ++i) CHECK(at.data()[i] == 0.5);
}

TEST_CASE("tape forward matches the plain-kernel reference network") {
    Rng rng(19);
    const std::size_t n = 7;
    const DenseMatrix x = random_matrix(rng, n, 5);
    const GraphFilter filter = ring_filter(n);
    const DenseMatrix filter_dense = filter.to_dense();
    for (Ablation ablation : {Ablation::kFull, Ablation::kNoAttention}) {
        CAPTURE(to_string(ablation));
        const ArchitectureSpec spec = small_spec(5);
        const ModelParams params = ModelParams::init(spec, 555);
        Tape tape;
        const ForwardVars fw = forward_model(tape, x, filter, params, spec, ablation, nullptr);
        const auto ref = testing::reference_forward(x, filter_dense, params, spec, ablation);
        for (std::size_t l = 1; l <= spec.depth(); ++l) {
            const DenseMatrix& zt = tape.value(fw.z[l]);
            for (std::size_t i = 0; i < zt.size(); ++i) {
                CHECK(std::abs(zt.data()[i] - ref.z[l].data()[i]) < 1e-12);
            }
        }
        const DenseMatrix& at = tape.value(fw.a_tilde);
        for (std::size_t i = 0; i < at.size(); ++i) {
            CHECK(std::abs(at.data()[i] - ref.a_tilde.data()[i]) < 1e-12);
        }
    }
}

TEST_CASE("gamma=1 without attention reduces to a pure graph stack") {
    Rng rng(29);
    const std::size_t n = 6;
    const DenseMatrix x = random_matrix(rng, n, 4);
    const GraphFilter filter = ring_filter(n);
    const ArchitectureSpec spec = small_spec(4, 2, 1.0);
    const ModelParams params = ModelParams::init(spec, 99);
    Tape tape;
    const ForwardVars fw =
        forward_model(tape, x, filter, params, spec, Ablation::kNoAttention, nullptr);

    // Hand-built graph auto-encoder: z_l = act(F z_{l-1} U_l) with z_0 = X,
    // ReLU on hidden layers except the linear middle and final ones.
    DenseMatrix z = x;
    for (std::size_t l = 1; l <= spec.depth(); ++l) {
        DenseMatrix pre = spmm(filter, matmul(z, params.gae_w[l - 1]));
        z = (l < spec.depth() && l != spec.middle_layer()) ? relu(pre) : pre;
        const DenseMatrix& zt = tape.value(fw.z[l]);
        for (std::size_t i = 0; i < z.size(); ++i) {
            CHECK(std::abs(zt.data()[i] - z.data()[i]) < 1e-12);
        }
    }
}

TEST_CASE("every parameter receives gradient under the full loss") {
    Rng rng(47);
    const std::size_t n = 14;
    const ArchitectureSpec spec = small_spec(5);
    ModelParams params = ModelParams::init(spec, 2024);
    const DenseMatrix x = random_matrix(rng, n, 5);
    const SparseGraph graph = ring_graph(n);
    const GraphFilter filter = normalize_filter(graph);
    const DenseMatrix a_dense = graph.to_dense();
    const DenseMatrix centers = random_matrix(rng, 2, 2);

    auto run = [&](Ablation ablation) {
        Tape tape;
        std::vector<Var> pvars;
        const ForwardVars fw = forward_model(tape, x, filter, params, spec, ablation, &pvars);
        const Var t_var = tape.student_t(fw.h_mid, centers);
        const DenseMatrix p = target_distribution(tape.value(t_var));
        const Var z_dist = tape.row_softmax(fw.z_mid);
        Var total = tape.scale(tape.frobenius_sq_diff(fw.x_hat, x), 0.5);
        total = tape.add(total, tape.frobenius_sq_diff(fw.a_tilde, a_dense));
        total = tape.add(total, tape.frobenius_sq_diff(fw.z[spec.depth()], x));
        total = tape.add(total, tape.kl_to_target(p, t_var));
        total = tape.add(total, tape.kl_to_target(p, z_dist));
        tape.backward(total);
        std::vector<bool> nonzero;
        for (Var v : pvars) {
            const DenseMatrix& g = tape.grad(v);
            bool any = false;
            for (std::size_t i = 0; i < g.size(); ++i) any = any || g.data()[i] != 0.0;
            nonzero.push_back(any);
        }
        return nonzero;
    };

    const auto full = run(Ablation::kFull);
    for (std::size_t i = 0; i < full.size(); ++i) {
        CAPTURE(i);
        CHECK(full[i]);
    }
    // Without attention the head projections are off the loss path.
    const auto reduced = run(Ablation::kNoAttention);
    const std::size_t dense_params = 3 * spec.depth();  // cae_w, cae_b, gae_w
    for (std::size_t i = 0; i < reduced.size(); ++i) {
        CAPTURE(i);
        if (i < dense_params) {
            CHECK(reduced[i]);
        } else {
            CHECK_FALSE(reduced[i]);
        }
    }
}

TEST_CASE("fixed seed makes init and forward bit-identical") {
    const ArchitectureSpec spec = small_spec(4);
    Rng rng(3);
    const DenseMatrix x = random_matrix(rng, 5, 4);
    const GraphFilter filter = ring_filter(5);
    auto run = [&] {
        const ModelParams params = ModelParams::init(spec, 31337);
        Tape tape;
        const ForwardVars fw =
            forward_model(tape, x, filter, params, spec, Ablation::kFull, nullptr);
        return std::pair{tape.value(fw.z_mid), tape.value(fw.x_hat)};
    };
    const auto [z1, x1] = run();
    const auto [z2, x2] = run();
    for (std::size_t i = 0; i < z1.size(); ++i) CHECK(z1.data()[i] == z2.data()[i]);
    for (std::size_t i = 0; i < x1.size(); ++i) CHECK(x1.data()[i] == x2.data()[i]);
}
