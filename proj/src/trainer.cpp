#include "caegcn/trainer.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "caegcn/dataset.hpp"
#include "caegcn/graph_build.hpp"
#include "caegcn/optim.hpp"
#include "caegcn/rng.hpp"
#include "caegcn/tape.hpp"

namespace caegcn {

namespace {

SparseGraph build_knn_graph(const DenseMatrix& x, const ExperimentConfig& config) {
    DenseMatrix s;
    if (config.similarity == SimilarityKind::kHeat) {
        const double t = config.heat_t ? *config.heat_t : median_sq_distance(x);
        s = heat_kernel_similarity(x, t);
    } else {
        s = inner_product_similarity(x);
    }
    return knn_graph(s, *config.knn_k);
}

std::vector<const DenseMatrix*> collect_grads(Tape& tape, const std::vector<Var>& vars) {
    std::vector<const DenseMatrix*> grads;
    grads.reserve(vars.size());
    for (Var v : vars) grads.push_back(&tape.grad(v));
    return grads;
}

void check_losses_finite(const LossBreakdown& lb, std::size_t epoch) {
    const double terms[] = {lb.cae_content, lb.gae_graph, lb.gae_content,
                            lb.cae_kl,      lb.gae_kl,    lb.total};
    for (double v : terms) {
        if (!std::isfinite(v)) {
            throw std::runtime_error("train: non-finite loss at epoch " +
                                     std::to_string(epoch));
        }
    }
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("export: cannot open " + path + " for writing");
    out << content;
    if (!out) throw std::runtime_error("export: write failed for " + path);
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string matrix_csv(const DenseMatrix& m) {
    std::string out;
    out.reserve(m.size() * 20);
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = 0; j < m.cols(); ++j) {
            if (j) out += ',';
            out += format_double(m(i, j));
        }
        out += '\n';
    }
    return out;
}

}  // namespace

Dataset load_dataset(const ExperimentConfig& config) {
    config.validate();
    Dataset ds;
    ds.x = load_features_csv(config.features_path);
    if (config.labels_path) {
        ds.y = load_labels(*config.labels_path);
        if (ds.y->size() != ds.x.rows()) {
            throw std::runtime_error("load_dataset: " + std::to_string(ds.y->size()) +
                                     " labels but " + std::to_string(ds.x.rows()) +
                                     " feature rows");
        }
    }
    if (config.graph_path) {
        ds.graph = load_graph(*config.graph_path, ds.x.rows());
    }
    return ds;
}

std::vector<double> pretrain_cae(const DenseMatrix& x, ModelParams& params,
                                 const ArchitectureSpec& spec, std::size_t epochs, double lr) {
    Adam adam(AdamConfig{.lr = lr});
    const auto targets = params.cae_trainable();
    std::vector<double> curve;
    curve.reserve(epochs);
    for (std::size_t epoch = 1; epoch <= epochs; ++epoch) {
        Tape tape;
        std::vector<Var> pvars;
        const CaeVars cae = forward_cae(tape, x, params, spec, &pvars);
        const Var loss = tape.scale(tape.frobenius_sq_diff(cae.x_hat, x), 0.5);
        const double value = tape.scalar_value(loss);
        if (!std::isfinite(value)) {
            throw std::runtime_error("pretrain: non-finite loss at epoch " +
                                     std::to_string(epoch));
        }
        curve.push_back(value);
        tape.backward(loss);
        adam.step(targets, collect_grads(tape, pvars));
    }
    return curve;
}

RunReport train_on(const DenseMatrix& x, const std::optional<LabelVector>& y,
                   const SparseGraph& graph, const ExperimentConfig& config) {
    config.validate();
    if (graph.n != x.rows()) {
        throw std::invalid_argument("train: graph has " + std::to_string(graph.n) +
                                    " nodes but features have " + std::to_string(x.rows()) +
                                    " rows");
    }
    if (y && y->size() != x.rows()) {
        throw std::invalid_argument("train: " + std::to_string(y->size()) + " labels but " +
                                    std::to_string(x.rows()) + " feature rows");
    }
    const auto t_start = std::chrono::steady_clock::now();
    const ArchitectureSpec spec = config.architecture(x.cols());
    const GraphFilter filter = normalize_filter(graph);

    Rng master(config.seed);
    const std::uint64_t init_seed = master.next_u64();
    const std::uint64_t kmeans_seed = master.next_u64();

    ModelParams params = ModelParams::init(spec, init_seed);
    pretrain_cae(x, params, spec, config.pretrain_epochs, config.lr);

    {
        Tape tape;
        const CaeVars cae = forward_cae(tape, x, params, spec, nullptr);
        const KmeansResult km =
            kmeans(tape.value(cae.h_mid), spec.clusters, config.kmeans_iters, kmeans_seed);
        params.centers = km.centers;
    }

    RunReport report;
    report.config = config;
    report.n = x.rows();
    report.input_dim = x.cols();
    report.epochs.reserve(config.train_epochs);

    const DenseMatrix a_dense = graph.to_dense();
    Adam adam(AdamConfig{.lr = config.lr});
    auto targets = params.trainable();

    for (std::size_t epoch = 1; epoch <= config.train_epochs; ++epoch) {
        Tape tape;
        std::vector<Var> pvars;
        const ForwardVars fw =
            forward_model(tape, x, filter, params, spec, config.ablation, &pvars);
        const Var t_var = tape.student_t(fw.h_mid, params.centers);
        DenseMatrix p;
        try {
            p = target_distribution(tape.value(t_var));
        } catch (const std::runtime_error& e) {
            throw std::runtime_error("epoch " + std::to_string(epoch) + ": " + e.what());
        }
        const Var z_dist = tape.row_softmax(fw.z_mid);

        const Var l_cae_content = tape.scale(tape.frobenius_sq_diff(fw.x_hat, x), 0.5);
        const Var l_gae_graph = tape.frobenius_sq_diff(fw.a_tilde, a_dense);
        const Var l_gae_content = tape.frobenius_sq_diff(fw.z[spec.depth()], x);
        const Var l_cae_kl = tape.kl_to_target(p, t_var);
        const Var l_gae_kl = tape.kl_to_target(p, z_dist);

        Var total = tape.add(l_cae_content, tape.add(l_cae_kl, l_gae_kl));
        if (config.ablation != Ablation::kNoGraphLoss) total = tape.add(total, l_gae_graph);
        if (config.ablation != Ablation::kNoContentLoss) total = tape.add(total, l_gae_content);

        LossBreakdown lb;
        lb.cae_content = tape.scalar_value(l_cae_content);
        lb.gae_graph = tape.scalar_value(l_gae_graph);
        lb.gae_content = tape.scalar_value(l_gae_content);
        lb.cae_kl = tape.scalar_value(l_cae_kl);
        lb.gae_kl = tape.scalar_value(l_gae_kl);
        lb.total = tape.scalar_value(total);
        check_losses_finite(lb, epoch);
        report.epochs.push_back(lb);

        tape.backward(total);
        adam.step(targets, collect_grads(tape, pvars));
    }

    {
        Tape tape;
        const ForwardVars fw =
            forward_model(tape, x, filter, params, spec, config.ablation, nullptr);
        const DenseMatrix z_dist = gae_soft_assign(tape.value(fw.z_mid), spec.clusters);
        report.labels = hard_assign(z_dist);
        report.h_mid = tape.value(fw.h_mid);
        report.z_mid = tape.value(fw.z_mid);
    }

    if (y) {
        ClusterScores s;
        s.acc = accuracy(*y, report.labels);
        s.nmi = nmi(*y, report.labels);
        s.ari = ari(*y, report.labels);
        s.f1 = macro_f1(*y, report.labels);
        report.scores = s;
    }
    report.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    return report;
}

RunReport train(const ExperimentConfig& config) {
    const Dataset ds = load_dataset(config);
    const SparseGraph graph = ds.graph ? *ds.graph : build_knn_graph(ds.x, config);
    return train_on(ds.x, ds.y, graph, config);
}

void export_results(const RunReport& report, const std::string& out_dir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) {
        throw std::runtime_error("export: cannot create directory " + out_dir + ": " +
                                 ec.message());
    }
    const auto path = [&](const char* name) { return (fs::path(out_dir) / name).string(); };

    nlohmann::json j;
    const ExperimentConfig& cfg = report.config;
    j["features"] = cfg.features_path;
    if (cfg.labels_path) j["labels"] = *cfg.labels_path;
    if (cfg.graph_path) {
        j["graph"] = *cfg.graph_path;
    } else {
        j["similarity"] = to_string(cfg.similarity);
        j["k"] = *cfg.knn_k;
        if (cfg.heat_t) j["heat_t"] = *cfg.heat_t;
    }
    j["clusters"] = cfg.clusters;
    j["dims"] = cfg.full_dims(report.input_dim);
    j["heads"] = cfg.heads;
    j["gamma"] = cfg.gamma;
    j["lr"] = cfg.lr;
    j["pretrain_epochs"] = cfg.pretrain_epochs;
    j["epochs"] = cfg.train_epochs;
    j["kmeans_iters"] = cfg.kmeans_iters;
    j["seed"] = cfg.seed;
    j["ablation"] = to_string(cfg.ablation);
    j["n_samples"] = report.n;
    j["n_features"] = report.input_dim;
    j["wall_clock_seconds"] = report.wall_seconds;
    if (!report.epochs.empty()) j["final_total_loss"] = report.epochs.back().total;
    if (report.scores) {
        j["acc"] = report.scores->acc;
        j["nmi"] = report.scores->nmi;
        j["ari"] = report.scores->ari;
        j["f1"] = report.scores->f1;
    }
    write_text_file(path("metrics.json"), j.dump(2) + "\n");

    std::string assignments = "index,label\n";
    for (std::size_t i = 0; i < report.labels.size(); ++i) {
        assignments += std::to_string(i) + "," + std::to_string(report.labels[i]) + "\n";
    }
    write_text_file(path("assignments.csv"), assignments);

    write_text_file(path("embeddings_cae.csv"), matrix_csv(report.h_mid));
    write_text_file(path("embeddings_gae.csv"), matrix_csv(report.z_mid));

    std::string losses = "epoch,l_cae_content,l_gae_graph,l_gae_content,l_cae_kl,l_gae_kl,total\n";
    for (std::size_t e = 0; e < report.epochs.size(); ++e) {
        const LossBreakdown& lb = report.epochs[e];
        losses += std::to_string(e + 1);
        for (double v : {lb.cae_content, lb.gae_graph, lb.gae_content, lb.cae_kl, lb.gae_kl,
                         lb.total}) {
            losses += ',';
            losses += format_double(v);
        }
        losses += '\n';
    }
    write_text_file(path("losses.csv"), losses);
}

}  // namespace caegcn
