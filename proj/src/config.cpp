#include "caegcn/config.hpp"

#include <stdexcept>

namespace caegcn {

SimilarityKind parse_similarity(const std::string& name) {
    if (name == "heat") return SimilarityKind::kHeat;
    if (name == "inner") return SimilarityKind::kInner;
    throw std::invalid_argument("unknown similarity '" + name + "' (expected heat|inner)");
}

std::string to_string(SimilarityKind kind) {
    return kind == SimilarityKind::kHeat ? "heat" : "inner";
}

void ExperimentConfig::validate() const {
    if (features_path.empty()) throw std::invalid_argument("config: features path required");
    if (clusters < 2) throw std::invalid_argument("config: need at least 2 clusters");
    if (graph_path.has_value() == knn_k.has_value()) {
        throw std::invalid_argument(
            "config: exactly one of a graph file or KNN construction (--k) must be chosen");
    }
    if (graph_path && heat_t) {
        throw std::invalid_argument("config: --heat-t only applies when building a KNN graph");
    }
    if (knn_k && *knn_k < 1) throw std::invalid_argument("config: K must be >= 1");
    if (heat_t && !(*heat_t > 0.0)) {
        throw std::invalid_argument("config: heat scale must be > 0");
    }
    if (!(lr > 0.0)) throw std::invalid_argument("config: lr must be > 0");
    if (heads < 1) throw std::invalid_argument("config: need at least 1 head");
    if (!(gamma >= 0.0 && gamma <= 1.0)) {
        throw std::invalid_argument("config: gamma must be in [0,1]");
    }
    if (kmeans_iters < 1) throw std::invalid_argument("config: kmeans iters must be >= 1");
    const auto hidden = resolved_hidden_dims();
    if (hidden.size() % 2 == 0) {
        throw std::invalid_argument(
            "config: dims must list an odd number of hidden widths (encoder + middle + "
            "decoder), got " +
            std::to_string(hidden.size()));
    }
    if (hidden[hidden.size() / 2] != clusters) {
        throw std::invalid_argument("config: middle width " +
                                    std::to_string(hidden[hidden.size() / 2]) +
                                    " must equal cluster count " + std::to_string(clusters));
    }
}

std::vector<std::size_t> ExperimentConfig::resolved_hidden_dims() const {
    if (!hidden_dims.empty()) return hidden_dims;
    return {500, 10, clusters, 500, 500};
}

std::vector<std::size_t> ExperimentConfig::full_dims(std::size_t input_dim) const {
    std::vector<std::size_t> dims;
    const auto hidden = resolved_hidden_dims();
    dims.reserve(hidden.size() + 2);
    dims.push_back(input_dim);
    dims.insert(dims.end(), hidden.begin(), hidden.end());
    dims.push_back(input_dim);
    return dims;
}

ArchitectureSpec ExperimentConfig::architecture(std::size_t input_dim) const {
    ArchitectureSpec spec;
    spec.dims = full_dims(input_dim);
    spec.clusters = clusters;
    spec.heads = heads;
    spec.gamma = gamma;
    spec.validate();
    return spec;
}

}  // namespace caegcn
