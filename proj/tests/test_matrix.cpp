#include <doctest.h>

#include <stdexcept>

#include <cmath>

#include "caegcn/matrix.hpp"
#include "caegcn/rng.hpp"
#include "support/oracles.hpp"

using namespace caegcn;

TEST_CASE("matmul against identity leaves the operand unchanged") {
    const DenseMatrix eye = DenseMatrix::from_rows({{1, 0}, {0, 1}});
    const DenseMatrix m = DenseMatrix::from_rows({{3, -1, 2}, {0.5, 4, -7}});
    const DenseMatrix out = matmul(eye, m);
    for (std::size_t i = 0; i < m.size(); ++i) CHECK(out.data()[i] == m.data()[i]);
}

TEST_CASE("matmul rejects mismatched inner dimensions with both shapes named") {
    const DenseMatrix a(2, 3), b(4, 2);
    CHECK_THROWS_WITH_AS(matmul(a, b), doctest::Contains("2x3"), std::invalid_argument);
    CHECK_THROWS_WITH_AS(matmul(a, b), doctest::Contains("4x2"), std::invalid_argument);
}

TEST_CASE("matmul_nt matches matmul with an explicit transpose") {
    Rng rng(7);
    const DenseMatrix a = testing::random_matrix(rng, 4, 6);
    const DenseMatrix b = testing::random_matrix(rng, 5, 6);
    const DenseMatrix direct = matmul_nt(a, b);
    const DenseMatrix viaT = matmul(a, transpose(b));
    for (std::size_t i = 0; i < direct.size(); ++i) {
        CHECK(direct.data()[i] == doctest::Approx(viaT.data()[i]).epsilon(1e-14));
    }
}

TEST_CASE("relu splits on sign") {
    const DenseMatrix out = relu(DenseMatrix::from_rows({{-1, 2}}));
    CHECK(out(0, 0) == 0.0);
    CHECK(out(0, 1) == 2.0);
}

TEST_CASE("sigmoid at zero is one half") {
    CHECK(sigmoid(DenseMatrix::from_rows({{0}}))(0, 0) == doctest::Approx(0.5));
}

TEST_CASE("row softmax of a constant row is uniform") {
    const DenseMatrix out = row_softmax(DenseMatrix::from_rows({{0, 0}}));
    CHECK(out(0, 0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(out(0, 1) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("row softmax rows are probability vectors") {
    Rng rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        const DenseMatrix m = testing::random_matrix(rng, 6, 9, -30.0, 30.0);
        const DenseMatrix s = row_softmax(m);
        for (std::size_t i = 0; i < s.rows(); ++i) {
            double sum = 0.0;
            for (std::size_t j = 0; j < s.cols(); ++j) {
                CHECK(s(i, j) > 0.0);
                CHECK(s(i, j) < 1.0);
                sum += s(i, j);
            }
            CHECK(std::abs(sum - 1.0) < 1e-12);
        }
    }
}

TEST_CASE("add_bias_row broadcasts over rows") {
    const DenseMatrix a = DenseMatrix::from_rows({{1, 2}, {3, 4}});
    const DenseMatrix b = DenseMatrix::from_rows({{10, 20}});
    const DenseMatrix out = add_bias_row(a, b);
    CHECK(out(0, 0) == 11.0);
    CHECK(out(1, 1) == 24.0);
}

TEST_CASE("concat_cols lays parts side by side") {
    const DenseMatrix a = DenseMatrix::from_rows({{1}, {2}});
    const DenseMatrix b = DenseMatrix::from_rows({{3, 4}, {5, 6}});
    const DenseMatrix out = concat_cols({&a, &b});
    CHECK(out.rows() == 2);
    CHECK(out.cols() == 3);
    CHECK(out(0, 0) == 1.0);
    CHECK(out(0, 2) == 4.0);
    CHECK(out(1, 1) == 5.0);
}

TEST_CASE("frobenius_sq_diff on a 1x1 gap") {
    const DenseMatrix a = DenseMatrix::from_rows({{2}});
    const DenseMatrix b = DenseMatrix::from_rows({{0}});
    CHECK(frobenius_sq_diff(a, b) == 4.0);
}

TEST_CASE("kl_sum_floored handles hard zeros via the floor") {
    const DenseMatrix p = DenseMatrix::from_rows({{1, 0}});
    const DenseMatrix q = DenseMatrix::from_rows({{0.5, 0.5}});
    CHECK(kl_sum_floored(p, q) == doctest::Approx(std::log(2.0)).epsilon(1e-9));
}

TEST_CASE("student_t_rows normalizes each row") {
    Rng rng(3);
    const DenseMatrix h = testing::random_matrix(rng, 8, 4);
    const DenseMatrix centers = testing::random_matrix(rng, 3, 4);
    const DenseMatrix t = student_t_rows(h, centers);
    for (std::size_t i = 0; i < t.rows(); ++i) {
        double sum = 0.0;
        for (std::size_t j = 0; j < t.cols(); ++j) sum += t(i, j);
        CHECK(std::abs(sum - 1.0) < 1e-12);
    }
}
