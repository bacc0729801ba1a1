#include <doctest.h>

#include <stdexcept>

#include "caegcn/config.hpp"

using namespace caegcn;

namespace {

ExperimentConfig base_config() {
    ExperimentConfig c;
    c.features_path = "features.csv";
    c.clusters = 3;
    c.knn_k = 5;
    c.hidden_dims = {8, 6, 3, 6, 8};
    return c;
}

}  // namespace

TEST_CASE("config defaults match the documented values") {
    const ExperimentConfig c;
    CHECK(c.heads == 8);
    CHECK(c.gamma == 0.5);
    CHECK(c.lr == 0.001);
    CHECK(c.pretrain_epochs == 50);
    CHECK(c.train_epochs == 200);
    CHECK(c.kmeans_iters == 1000);
    CHECK(c.similarity == SimilarityKind::kHeat);
    CHECK(c.ablation == Ablation::kFull);
}

TEST_CASE("default hidden plan is 500-10-C-500-500") {
    ExperimentConfig c = base_config();
    c.hidden_dims.clear();
    CHECK(c.resolved_hidden_dims() == std::vector<std::size_t>{500, 10, 3, 500, 500});
    CHECK(c.full_dims(784) == std::vector<std::size_t>{784, 500, 10, 3, 500, 500, 784});
}

TEST_CASE("graph source exclusivity") {
    ExperimentConfig c = base_config();
    CHECK_NOTHROW(c.validate());

    SUBCASE("both graph and K") {
        c.graph_path = "g.txt";
        CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    }
    SUBCASE("neither graph nor K") {
        c.knn_k.reset();
        CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    }
    SUBCASE("graph alone is fine") {
        c.knn_k.reset();
        c.graph_path = "g.txt";
        CHECK_NOTHROW(c.validate());
    }
    SUBCASE("heat scale conflicts with a supplied graph") {
        c.knn_k.reset();
        c.graph_path = "g.txt";
        c.heat_t = 2.0;
        CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    }
}

TEST_CASE("config rejects bad hyperparameters") {
    ExperimentConfig c = base_config();
    SUBCASE("missing features") {
        c.features_path.clear();
        CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    }
    SUBCASE("one cluster") {
        c.clusters = 1;
        CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    }
    SUBCASE("nonpositive lr") {
        c.lr = 0.0;
        CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    }
    SUBCASE("gamma out of range") {
        c.gamma = -0.1;
        CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    }
    SUBCASE("even hidden count") {
        c.hidden_dims = {8, 3, 3, 8};
        CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    }
    SUBCASE("middle width != clusters") {
        c.hidden_dims = {8, 6, 4, 6, 8};
        CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    }
    SUBCASE("nonpositive heat scale") {
        c.heat_t = 0.0;
        CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    }
}

TEST_CASE("architecture derives from config plus the data width") {
    const ExperimentConfig c = base_config();
    const ArchitectureSpec spec = c.architecture(12);
    CHECK(spec.dims == std::vector<std::size_t>{12, 8, 6, 3, 6, 8, 12});
    CHECK(spec.depth() == 6);
    CHECK(spec.middle_layer() == 3);
    CHECK(spec.middle_dim() == 3);
    CHECK(spec.heads == 8);
}

TEST_CASE("similarity names parse") {
    CHECK(parse_similarity("heat") == SimilarityKind::kHeat);
    CHECK(parse_similarity("inner") == SimilarityKind::kInner);
    CHECK_THROWS_AS(parse_similarity("cosine"), std::invalid_argument);
    CHECK(to_string(SimilarityKind::kInner) == "inner");
}
