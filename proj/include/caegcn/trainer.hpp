#pragma once

#include <optional>
#include <string>
#include <vector>

#include "caegcn/config.hpp"
#include "caegcn/metrics.hpp"
#include "caegcn/model.hpp"
#include "caegcn/selfsup.hpp"
#include "caegcn/sparse.hpp"

namespace caegcn {

struct ClusterScores {
    double acc = 0.0;
    double nmi = 0.0;
    double ari = 0.0;
    double f1 = 0.0;
};

struct RunReport {
    ExperimentConfig config;
    std::size_t n = 0;
    std::size_t input_dim = 0;
    std::vector<LossBreakdown> epochs;  // joint-training loss curve
    LabelVector labels;                 // final hard assignment
    std::optional<ClusterScores> scores;
    DenseMatrix h_mid;  // content middle-layer embedding
    DenseMatrix z_mid;  // graph middle-layer embedding
    double wall_seconds = 0.0;
};

// Loaded experiment inputs. The graph is absent when it must be built from
// feature similarities.
struct Dataset {
    DenseMatrix x;
    std::optional<LabelVector> y;
    std::optional<SparseGraph> graph;
};

Dataset load_dataset(const ExperimentConfig& config);

// Minimizes the content reconstruction loss alone with Adam; only the CAE
// weights move. Returns the per-epoch loss curve. Throws on a non-finite
// loss, naming the epoch.
std::vector<double> pretrain_cae(const DenseMatrix& x, ModelParams& params,
                                 const ArchitectureSpec& spec, std::size_t epochs, double lr);

// The full procedure on in-memory data: build the filter, pretrain, K-means
// center init, joint training with the self-supervised target, final hard
// assignment and (when labels exist) scoring.
RunReport train_on(const DenseMatrix& x, const std::optional<LabelVector>& y,
                   const SparseGraph& graph, const ExperimentConfig& config);

// load_dataset + graph construction + train_on.
RunReport train(const ExperimentConfig& config);

// Writes metrics.json, assignments.csv, embeddings_{cae,gae}.csv, losses.csv.
void export_results(const RunReport& report, const std::string& out_dir);

}  // namespace caegcn
