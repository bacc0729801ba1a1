#pragma once

#include <cstddef>
#include <initializer_list>
#include <string>
#include <vector>

namespace caegcn {

// Row-major dense matrix of doubles. The carrier type for features,
// activations, attention weights and model parameters.
class DenseMatrix {
public:
    DenseMatrix() = default;
    DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    static DenseMatrix from_rows(std::initializer_list<std::initializer_list<double>> rows);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t size() const { return data_.size(); }
    bool empty() const { return data_.empty(); }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    double* row(std::size_t i) { return data_.data() + i * cols_; }
    const double* row(std::size_t i) const { return data_.data() + i * cols_; }

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }

    bool same_shape(const DenseMatrix& other) const {
        return rows_ == other.rows_ && cols_ == other.cols_;
    }
    bool all_finite() const;
    void fill(double v) { std::fill(data_.begin(), data_.end(), v); }
    void release() {
        rows_ = cols_ = 0;
        std::vector<double>().swap(data_);
    }

    std::string shape_str() const;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

// Throws std::invalid_argument naming `op` and both shapes.
void check_same_shape(const char* op, const DenseMatrix& a, const DenseMatrix& b);

// ---- forward kernels ------------------------------------------------------

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b);     // a * b
DenseMatrix matmul_nt(const DenseMatrix& a, const DenseMatrix& b);  // a * b^T
DenseMatrix transpose(const DenseMatrix& a);

DenseMatrix add(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix sub(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix scale(const DenseMatrix& a, double s);
DenseMatrix add_bias_row(const DenseMatrix& a, const DenseMatrix& bias);  // a + 1*bias

DenseMatrix relu(const DenseMatrix& a);
DenseMatrix sigmoid(const DenseMatrix& a);
// Max-subtracted row softmax; each output row sums to 1.
DenseMatrix row_softmax(const DenseMatrix& a);
DenseMatrix concat_cols(const std::vector<const DenseMatrix*>& parts);

// Student-t similarity rows: out(i,c) = (1+||h_i - centers_c||^2)^-1, row-normalized.
DenseMatrix student_t_rows(const DenseMatrix& h, const DenseMatrix& centers);

double frobenius_sq_diff(const DenseMatrix& a, const DenseMatrix& b);  // sum (a-b)^2
// sum_ij p * (log max(p,floor) - log max(q,floor)) with floor = 1e-12.
double kl_sum_floored(const DenseMatrix& p, const DenseMatrix& q);

inline constexpr double kLogFloor = 1e-12;

// ---- accumulating kernels (used by backward) ------------------------------

void add_scaled_inplace(DenseMatrix& dst, const DenseMatrix& src, double s);
void matmul_acc(DenseMatrix& out, const DenseMatrix& a, const DenseMatrix& b);     // out += a*b
void matmul_nt_acc(DenseMatrix& out, const DenseMatrix& a, const DenseMatrix& b);  // out += a*b^T
void matmul_tn_acc(DenseMatrix& out, const DenseMatrix& a, const DenseMatrix& b);  // out += a^T*b

}  // namespace caegcn
