#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "caegcn/model.hpp"

namespace caegcn {

enum class SimilarityKind { kHeat, kInner };

SimilarityKind parse_similarity(const std::string& name);
std::string to_string(SimilarityKind kind);

struct ExperimentConfig {
    std::string features_path;
    std::optional<std::string> labels_path;
    std::optional<std::string> graph_path;
    SimilarityKind similarity = SimilarityKind::kHeat;
    std::optional<std::size_t> knn_k;
    std::optional<double> heat_t;  // median heuristic when absent
    std::size_t clusters = 0;
    // Hidden layer widths (input/output added from the data). Empty selects
    // the default plan 500-10-C-500-500.
    std::vector<std::size_t> hidden_dims;
    std::size_t heads = 8;
    double gamma = 0.5;
    double lr = 0.001;
    std::size_t pretrain_epochs = 50;
    std::size_t train_epochs = 200;
    std::size_t kmeans_iters = 1000;
    std::uint64_t seed = 0;
    Ablation ablation = Ablation::kFull;
    std::string out_dir;

    // Checks everything knowable before touching the data; throws
    // std::invalid_argument. Exactly one of {graph file, KNN construction}
    // must be selected.
    void validate() const;

    std::vector<std::size_t> resolved_hidden_dims() const;
    std::vector<std::size_t> full_dims(std::size_t input_dim) const;
    ArchitectureSpec architecture(std::size_t input_dim) const;
};

}  // namespace caegcn
