#include "senti/random_forest.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "senti/error.hpp"
#include "senti/rng.hpp"

namespace senti {

namespace {

std::int32_t feature_count(const SparseVector& x, std::int32_t feature) {
    // entries are sorted by index
    auto it = std::lower_bound(x.entries.begin(), x.entries.end(), feature,
                               [](const SparseVector::Entry& e, std::int32_t f) { return e.index < f; });
    if (it != x.entries.end() && it->index == feature) return it->count;
    return 0;
}

double gini(std::int64_t n0, std::int64_t n1) {
    std::int64_t n = n0 + n1;
    if (n == 0) return 0.0;
    double p0 = static_cast<double>(n0) / n;
    double p1 = static_cast<double>(n1) / n;
    return 1.0 - p0 * p0 - p1 * p1;
}

struct BestSplit {
    bool found = false;
    std::int32_t feature = -1;
    std::int32_t threshold = 0;
    double reduction = 0.0;
};

class TreeBuilder {
public:
    TreeBuilder(const FeatureMatrix& data, const RfConfig& config, Rng rng)
        : data_(data), config_(config), rng_(rng) {
        features_per_split_ = config.features_per_split > 0
                                  ? config.features_per_split
                                  : static_cast<int>(std::ceil(std::sqrt(data.vocab->size())));
        features_per_split_ = std::min<int>(features_per_split_, data.vocab->size());
    }

    DecisionTree build(std::vector<std::size_t> samples) {
        tree_.clear();
        grow(std::move(samples), 0);
        return std::move(tree_);
    }

private:
    std::int32_t grow(std::vector<std::size_t> samples, int depth) {
        std::int64_t n1 = 0;
        for (std::size_t i : samples) n1 += data_.labels[i];
        std::int64_t n0 = static_cast<std::int64_t>(samples.size()) - n1;

        bool pure = n0 == 0 || n1 == 0;
        bool depth_capped = config_.max_depth >= 0 && depth >= config_.max_depth;
        if (pure || depth_capped || samples.size() < 2) {
            return make_leaf(n0, n1);
        }

        BestSplit best = find_split(samples, gini(n0, n1));
        if (!best.found) return make_leaf(n0, n1);

        std::vector<std::size_t> left, right;
        for (std::size_t i : samples) {
            (feature_count(data_.rows[i], best.feature) >= best.threshold ? right : left).push_back(i);
        }
        samples.clear();
        samples.shrink_to_fit();

        std::int32_t node = static_cast<std::int32_t>(tree_.size());
        tree_.emplace_back();
        tree_[node].feature = best.feature;
        tree_[node].threshold = best.threshold;
        std::int32_t left_child = grow(std::move(left), depth + 1);
        std::int32_t right_child = grow(std::move(right), depth + 1);
        tree_[node].left = left_child;
        tree_[node].right = right_child;
        return node;
    }

    std::int32_t make_leaf(std::int64_t n0, std::int64_t n1) {
        std::int32_t node = static_cast<std::int32_t>(tree_.size());
        tree_.emplace_back();
        tree_[node].label = n1 > n0 ? 1 : 0;  // tie -> 0
        return node;
    }

    BestSplit find_split(const std::vector<std::size_t>& samples, double parent_gini) {
        BestSplit best;
        double n = static_cast<double>(samples.size());

        auto feature_ids = rng_.sample_indices(static_cast<std::size_t>(data_.vocab->size()),
                                               static_cast<std::size_t>(features_per_split_));
        std::vector<std::pair<std::int32_t, int>> values;  // (count value, label)
        for (std::size_t f : feature_ids) {
            auto feature = static_cast<std::int32_t>(f);
            values.clear();
            values.reserve(samples.size());
            for (std::size_t i : samples) {
                values.emplace_back(feature_count(data_.rows[i], feature), data_.labels[i]);
            }
            std::sort(values.begin(), values.end());

            // Sweep distinct values ascending; threshold t sends count >= t right.
            std::int64_t left0 = 0, left1 = 0;
            std::int64_t total1 = 0;
            for (const auto& [v, y] : values) total1 += y;
            std::int64_t total0 = static_cast<std::int64_t>(values.size()) - total1;

            std::size_t i = 0;
            while (i < values.size()) {
                std::int32_t v = values[i].first;
                if (i > 0) {
                    // candidate threshold at the start of this value group
                    double child =
                        (static_cast<double>(left0 + left1) / n) * gini(left0, left1) +
                        (static_cast<double>(total0 - left0 + total1 - left1) / n) *
                            gini(total0 - left0, total1 - left1);
                    double reduction = parent_gini - child;
                    if (!best.found || reduction > best.reduction) {
                        best.found = true;
                        best.feature = feature;
                        best.threshold = v;
                        best.reduction = reduction;
                    }
                }
                while (i < values.size() && values[i].first == v) {
                    left1 += values[i].second;
                    left0 += 1 - values[i].second;
                    ++i;
                }
            }
        }
        if (best.found && best.reduction <= 1e-12) best.found = false;
        return best;
    }

    const FeatureMatrix& data_;
    const RfConfig& config_;
    Rng rng_;
    int features_per_split_;
    DecisionTree tree_;
};

DecisionTree fit_tree(const FeatureMatrix& data, const RfConfig& config, std::uint64_t tree_index) {
    Rng rng = Rng::stream(config.seed, "rf.tree", tree_index);
    std::vector<std::size_t> samples;
    samples.reserve(data.size());
    if (config.bootstrap) {
        for (std::size_t i = 0; i < data.size(); ++i) {
            samples.push_back(static_cast<std::size_t>(rng.below(data.size())));
        }
    } else {
        for (std::size_t i = 0; i < data.size(); ++i) samples.push_back(i);
    }
    return TreeBuilder(data, config, rng).build(std::move(samples));
}

}  // namespace

int tree_predict(const DecisionTree& tree, const SparseVector& x) {
    std::int32_t node = 0;
    while (!tree[static_cast<std::size_t>(node)].is_leaf()) {
        const TreeNode& t = tree[static_cast<std::size_t>(node)];
        node = feature_count(x, t.feature) >= t.threshold ? t.right : t.left;
    }
    return tree[static_cast<std::size_t>(node)].label;
}

void RandomForest::fit(const FeatureMatrix& data) {
    require_both_classes(data, "rf");
    if (config_.n_trees < 1) throw InputError("rf: n_trees must be >= 1");

    trees_.assign(static_cast<std::size_t>(config_.n_trees), {});
    int n_threads = std::max(1, config_.n_threads);
    if (n_threads == 1) {
        for (std::size_t i = 0; i < trees_.size(); ++i) {
            trees_[i] = fit_tree(data, config_, i);
        }
        return;
    }
    // Trees are independent given their per-index streams; any interleaving
    // writes the same forest.
    std::vector<std::thread> workers;
    std::atomic<std::size_t> cursor{0};
    for (int w = 0; w < n_threads; ++w) {
        workers.emplace_back([&] {
            for (;;) {
                std::size_t i = cursor.fetch_add(1);
                if (i >= trees_.size()) return;
                trees_[i] = fit_tree(data, config_, i);
            }
        });
    }
    for (auto& worker : workers) worker.join();
}

int RandomForest::predict(const SparseVector& x) const {
    std::size_t votes_1 = 0;
    for (const auto& tree : trees_) votes_1 += tree_predict(tree, x) == 1;
    std::size_t votes_0 = trees_.size() - votes_1;
    return votes_1 > votes_0 ? 1 : 0;  // tie -> 0
}

double RandomForest::predict_score(const SparseVector& x) const {
    std::size_t votes_1 = 0;
    for (const auto& tree : trees_) votes_1 += tree_predict(tree, x) == 1;
    return static_cast<double>(votes_1) / static_cast<double>(trees_.size());
}

nlohmann::json RandomForest::params_to_json() const {
    nlohmann::json trees = nlohmann::json::array();
    for (const auto& tree : trees_) {
        nlohmann::json nodes = nlohmann::json::array();
        for (const auto& node : tree) {
            nodes.push_back({node.feature, node.threshold, node.left, node.right, node.label});
        }
        trees.push_back(std::move(nodes));
    }
    return {{"n_trees", config_.n_trees},
            {"max_depth", config_.max_depth},
            {"features_per_split", config_.features_per_split},
            {"bootstrap", config_.bootstrap},
            {"seed", config_.seed},
            {"trees", trees}};
}

RandomForest RandomForest::from_json(const nlohmann::json& j) {
    RfConfig config;
    config.n_trees = j.at("n_trees").get<int>();
    config.max_depth = j.at("max_depth").get<int>();
    config.features_per_split = j.at("features_per_split").get<int>();
    config.bootstrap = j.at("bootstrap").get<bool>();
    config.seed = j.at("seed").get<std::uint64_t>();
    RandomForest model(config);
    for (const auto& tree_json : j.at("trees")) {
        DecisionTree tree;
        for (const auto& n : tree_json) {
            TreeNode node;
            node.feature = n.at(0).get<std::int32_t>();
            node.threshold = n.at(1).get<std::int32_t>();
            node.left = n.at(2).get<std::int32_t>();
            node.right = n.at(3).get<std::int32_t>();
            node.label = n.at(4).get<std::int32_t>();
            tree.push_back(node);
        }
        model.trees_.push_back(std::move(tree));
    }
    return model;
}

}  // namespace senti
