#include "caegcn/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace caegcn {

namespace {

// Parallelizing tiny kernels costs more than it saves.
constexpr std::size_t kParallelFlopThreshold = 1u << 21;

std::string shape_of(std::size_t r, std::size_t c) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%zux%zu", r, c);
    return buf;
}

[[noreturn]] void throw_shape(const char* op, const DenseMatrix& a, const DenseMatrix& b) {
    throw std::invalid_argument(std::string(op) + ": incompatible shapes " + a.shape_str() +
                                " and " + b.shape_str());
}

}  // namespace

DenseMatrix DenseMatrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
    DenseMatrix m(rows.size(), rows.size() ? rows.begin()->size() : 0);
    std::size_t i = 0;
    for (const auto& r : rows) {
        if (r.size() != m.cols_) {
            throw std::invalid_argument("from_rows: ragged row " + std::to_string(i));
        }
        std::copy(r.begin(), r.end(), m.row(i));
        ++i;
    }
    return m;
}

bool DenseMatrix::all_finite() const {
    for (double v : data_) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

std::string DenseMatrix::shape_str() const { return shape_of(rows_, cols_); }

void check_same_shape(const char* op, const DenseMatrix& a, const DenseMatrix& b) {
    if (!a.same_shape(b)) throw_shape(op, a, b);
}

void matmul_acc(DenseMatrix& out, const DenseMatrix& a, const DenseMatrix& b) {
    if (a.cols() != b.rows()) throw_shape("matmul", a, b);
    if (out.rows() != a.rows() || out.cols() != b.cols()) throw_shape("matmul(out)", out, b);
    const std::size_t n = a.rows(), k = a.cols(), m = b.cols();
    const bool par = n * k * m >= kParallelFlopThreshold;
#pragma omp parallel for schedule(static) if (par)
    for (long long ii = 0; ii < (long long)n; ++ii) {
        const std::size_t i = (std::size_t)ii;
        const double* arow = a.row(i);
        double* crow = out.row(i);
        for (std::size_t p = 0; p < k; ++p) {
            const double av = arow[p];
            if (av == 0.0) continue;
            const double* brow = b.row(p);
            for (std::size_t j = 0; j < m; ++j) crow[j] += av * brow[j];
        }
    }
}

void matmul_nt_acc(DenseMatrix& out, const DenseMatrix& a, const DenseMatrix& b) {
    if (a.cols() != b.cols()) throw_shape("matmul_nt", a, b);
    if (out.rows() != a.rows() || out.cols() != b.rows()) throw_shape("matmul_nt(out)", out, b);
    const std::size_t n = a.rows(), k = a.cols(), m = b.rows();
    const bool par = n * k * m >= kParallelFlopThreshold;
#pragma omp parallel for schedule(static) if (par)
    for (long long ii = 0; ii < (long long)n; ++ii) {
        const std::size_t i = (std::size_t)ii;
        const double* arow = a.row(i);
        double* crow = out.row(i);
        for (std::size_t j = 0; j < m; ++j) {
            const double* brow = b.row(j);
            double acc = 0.0;
            for (std::size_t p = 0; p < k; ++p) acc += arow[p] * brow[p];
            crow[j] += acc;
        }
    }
}

void matmul_tn_acc(DenseMatrix& out, const DenseMatrix& a, const DenseMatrix& b) {
    if (a.rows() != b.rows()) throw_shape("matmul_tn", a, b);
    if (out.rows() != a.cols() || out.cols() != b.cols()) throw_shape("matmul_tn(out)", out, b);
    const std::size_t n = a.rows(), k = a.cols(), m = b.cols();
    // out(p,j) += sum_i a(i,p) * b(i,j); parallel over output rows p.
    const bool par = n * k * m >= kParallelFlopThreshold;
#pragma omp parallel for schedule(static) if (par)
    for (long long pp = 0; pp < (long long)k; ++pp) {
        const std::size_t p = (std::size_t)pp;
        double* crow = out.row(p);
        for (std::size_t i = 0; i < n; ++i) {
            const double av = a(i, p);
            if (av == 0.0) continue;
            const double* brow = b.row(i);
            for (std::size_t j = 0; j < m; ++j) crow[j] += av * brow[j];
        }
    }
}

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.cols() != b.rows()) throw_shape("matmul", a, b);
    DenseMatrix out(a.rows(), b.cols());
    matmul_acc(out, a, b);
    return out;
}

DenseMatrix matmul_nt(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.cols() != b.cols()) throw_shape("matmul_nt", a, b);
    DenseMatrix out(a.rows(), b.rows());
    matmul_nt_acc(out, a, b);
    return out;
}

DenseMatrix transpose(const DenseMatrix& a) {
    DenseMatrix out(a.cols(), a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) out(j, i) = a(i, j);
    return out;
}

DenseMatrix add(const DenseMatrix& a, const DenseMatrix& b) {
    check_same_shape("add", a, b);
    DenseMatrix out = a;
    const double* p = b.data();
    double* q = out.data();
    for (std::size_t i = 0; i < out.size(); ++i) q[i] += p[i];
    return out;
}

DenseMatrix sub(const DenseMatrix& a, const DenseMatrix& b) {
    check_same_shape("sub", a, b);
    DenseMatrix out = a;
    const double* p = b.data();
    double* q = out.data();
    for (std::size_t i = 0; i < out.size(); ++i) q[i] -= p[i];
    return out;
}

DenseMatrix scale(const DenseMatrix& a, double s) {
    DenseMatrix out = a;
    for (std::size_t i = 0; i < out.size(); ++i) out.data()[i] *= s;
    return out;
}

DenseMatrix add_bias_row(const DenseMatrix& a, const DenseMatrix& bias) {
    if (bias.rows() != 1 || bias.cols() != a.cols()) throw_shape("add_bias_row", a, bias);
    DenseMatrix out = a;
    for (std::size_t i = 0; i < out.rows(); ++i) {
        double* r = out.row(i);
        const double* b = bias.row(0);
        for (std::size_t j = 0; j < out.cols(); ++j) r[j] += b[j];
    }
    return out;
}

DenseMatrix relu(const DenseMatrix& a) {
    DenseMatrix out = a;
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (out.data()[i] < 0.0) out.data()[i] = 0.0;
    }
    return out;
}

DenseMatrix sigmoid(const DenseMatrix& a) {
    DenseMatrix out = a;
    for (std::size_t i = 0; i < out.size(); ++i) {
        out.data()[i] = 1.0 / (1.0 + std::exp(-out.data()[i]));
    }
    return out;
}

DenseMatrix row_softmax(const DenseMatrix& a) {
    if (a.cols() == 0) throw std::invalid_argument("row_softmax: empty rows");
    DenseMatrix out(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        const double* x = a.row(i);
        double* y = out.row(i);
        double mx = x[0];
        for (std::size_t j = 1; j < a.cols(); ++j) mx = std::max(mx, x[j]);
        double sum = 0.0;
        for (std::size_t j = 0; j < a.cols(); ++j) {
            y[j] = std::exp(x[j] - mx);
            sum += y[j];
        }
        for (std::size_t j = 0; j < a.cols(); ++j) y[j] /= sum;
    }
    return out;
}

DenseMatrix concat_cols(const std::vector<const DenseMatrix*>& parts) {
    if (parts.empty()) throw std::invalid_argument("concat_cols: no inputs");
    const std::size_t n = parts[0]->rows();
    std::size_t total = 0;
    for (const DenseMatrix* p : parts) {
        if (p->rows() != n) throw_shape("concat_cols", *parts[0], *p);
        total += p->cols();
    }
    DenseMatrix out(n, total);
    for (std::size_t i = 0; i < n; ++i) {
        double* dst = out.row(i);
        for (const DenseMatrix* p : parts) {
            const double* src = p->row(i);
            dst = std::copy(src, src + p->cols(), dst);
        }
    }
    return out;
}

DenseMatrix student_t_rows(const DenseMatrix& h, const DenseMatrix& centers) {
    if (h.cols() != centers.cols()) throw_shape("student_t", h, centers);
    const std::size_t n = h.rows(), c = centers.rows(), d = h.cols();
    if (c == 0) throw std::invalid_argument("student_t: no centers");
    DenseMatrix out(n, c);
    for (std::size_t i = 0; i < n; ++i) {
        const double* hi = h.row(i);
        double* ti = out.row(i);
        double sum = 0.0;
        for (std::size_t cc = 0; cc < c; ++cc) {
            const double* bc = centers.row(cc);
            double d2 = 0.0;
            for (std::size_t j = 0; j < d; ++j) {
                const double diff = hi[j] - bc[j];
                d2 += diff * diff;
            }
            ti[cc] = 1.0 / (1.0 + d2);
            sum += ti[cc];
        }
        for (std::size_t cc = 0; cc < c; ++cc) ti[cc] /= sum;
    }
    return out;
}

double frobenius_sq_diff(const DenseMatrix& a, const DenseMatrix& b) {
    check_same_shape("frobenius_sq_diff", a, b);
    double acc = 0.0;
    const double* p = a.data();
    const double* q = b.data();
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = p[i] - q[i];
        acc += d * d;
    }
    return acc;
}

double kl_sum_floored(const DenseMatrix& p, const DenseMatrix& q) {
    check_same_shape("kl", p, q);
    double acc = 0.0;
    const double* pp = p.data();
    const double* qq = q.data();
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (pp[i] == 0.0) continue;
        acc += pp[i] * (std::log(std::max(pp[i], kLogFloor)) -
                        std::log(std::max(qq[i], kLogFloor)));
    }
    return acc;
}

void add_scaled_inplace(DenseMatrix& dst, const DenseMatrix& src, double s) {
    check_same_shape("add_scaled", dst, src);
    double* d = dst.data();
    const double* p = src.data();
    for (std::size_t i = 0; i < dst.size(); ++i) d[i] += s * p[i];
}

}  // namespace caegcn
