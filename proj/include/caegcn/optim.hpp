#pragma once

#include <cstdint>
#include <vector>

#include "caegcn/matrix.hpp"
#include "caegcn/rng.hpp"

namespace caegcn {

struct AdamConfig {
    double lr = 0.001;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

// Adam with bias correction. Moment slots are keyed by position in the
// params list, so the caller must pass the same parameter order every step.
class Adam {
public:
    explicit Adam(AdamConfig cfg = {});

    void step(const std::vector<DenseMatrix*>& params,
              const std::vector<const DenseMatrix*>& grads);

    std::uint64_t step_count() const { return t_; }
    const AdamConfig& config() const { return cfg_; }

private:
    AdamConfig cfg_;
    std::uint64_t t_ = 0;
    std::vector<DenseMatrix> m_;
    std::vector<DenseMatrix> v_;
};

// Entries uniform in [-sqrt(6/(rows+cols)), +sqrt(6/(rows+cols))].
DenseMatrix xavier_init(std::size_t rows, std::size_t cols, Rng& rng);
DenseMatrix xavier_init(std::size_t rows, std::size_t cols, std::uint64_t seed);

}  // namespace caegcn
