#include "caegcn/optim.hpp"

#include <cmath>
#include <stdexcept>

namespace caegcn {

Adam::Adam(AdamConfig cfg) : cfg_(cfg) {
    if (!(cfg_.lr > 0.0)) throw std::invalid_argument("adam: lr must be > 0");
}

void Adam::step(const std::vector<DenseMatrix*>& params,
                const std::vector<const DenseMatrix*>& grads) {
    if (params.size() != grads.size()) {
        throw std::invalid_argument("adam: params/grads count mismatch");
    }
    if (m_.empty()) {
        m_.reserve(params.size());
        v_.reserve(params.size());
        for (const DenseMatrix* p : params) {
            m_.emplace_back(p->rows(), p->cols());
            v_.emplace_back(p->rows(), p->cols());
        }
    } else if (m_.size() != params.size()) {
        throw std::invalid_argument("adam: parameter count changed between steps");
    }
    ++t_;
    const double bc1 = 1.0 - std::pow(cfg_.beta1, double(t_));
    const double bc2 = 1.0 - std::pow(cfg_.beta2, double(t_));
    for (std::size_t k = 0; k < params.size(); ++k) {
        DenseMatrix& p = *params[k];
        const DenseMatrix& g = *grads[k];
        check_same_shape("adam", p, g);
        check_same_shape("adam(state)", p, m_[k]);
        double* pd = p.data();
        const double* gd = g.data();
        double* md = m_[k].data();
        double* vd = v_[k].data();
        for (std::size_t i = 0; i < p.size(); ++i) {
            md[i] = cfg_.beta1 * md[i] + (1.0 - cfg_.beta1) * gd[i];
            vd[i] = cfg_.beta2 * vd[i] + (1.0 - cfg_.beta2) * gd[i] * gd[i];
            const double mhat = md[i] / bc1;
            const double vhat = vd[i] / bc2;
            pd[i] -= cfg_.lr * mhat / (std::sqrt(vhat) + cfg_.eps);
        }
    }
}

DenseMatrix xavier_init(std::size_t rows, std::size_t cols, Rng& rng) {
    if (rows == 0 || cols == 0) {
        throw std::invalid_argument("xavier_init: zero dimension");
    }
    const double limit = std::sqrt(6.0 / double(rows + cols));
    DenseMatrix m(rows, cols);
    for (std::size_t i = 0; i < m.size(); ++i) m.data()[i] = rng.uniform(-limit, limit);
    return m;
}

DenseMatrix xavier_init(std::size_t rows, std::size_t cols, std::uint64_t seed) {
    Rng rng(seed);
    return xavier_init(rows, cols, rng);
}

}  // namespace caegcn
