#pragma once

#include <cstdint>

#include "senti/classifier.hpp"

namespace senti {

struct RfConfig {
    int n_trees = 100;
    int max_depth = 16;          // < 0 means unbounded
    int features_per_split = 0;  // 0 means ceil(sqrt(V))
    bool bootstrap = true;
    std::uint64_t seed = 0;
    int n_threads = 1;  // tree i always draws from stream (seed, "rf.tree", i),
                        // so the forest is identical at any thread count
};

struct TreeNode {
    std::int32_t feature = -1;  // -1 marks a leaf
    std::int32_t threshold = 0; // test is count >= threshold, true goes right
    std::int32_t left = -1;
    std::int32_t right = -1;
    std::int32_t label = 0;

    bool is_leaf() const { return feature < 0; }
};

using DecisionTree = std::vector<TreeNode>;

// Bagged Gini decision trees over BoW counts; prediction is the majority
// vote of the trees, exact ties going to label 0.
class RandomForest : public Classifier {
public:
    explicit RandomForest(RfConfig config = {}) : config_(config) {}

    std::string name() const override { return "rf"; }
    void fit(const FeatureMatrix& data) override;
    int predict(const SparseVector& x) const override;
    // Fraction of trees voting class 1.
    double predict_score(const SparseVector& x) const override;

    nlohmann::json params_to_json() const override;
    static RandomForest from_json(const nlohmann::json& j);

    const std::vector<DecisionTree>& trees() const { return trees_; }
    const RfConfig& config() const { return config_; }

private:
    RfConfig config_;
    std::vector<DecisionTree> trees_;
};

int tree_predict(const DecisionTree& tree, const SparseVector& x);

}  // namespace senti
