#pragma once

#include "senti/classifier.hpp"

namespace senti {

enum class KnnMetric { cosine, euclidean };

struct KnnConfig {
    int k = 5;
    KnnMetric metric = KnnMetric::cosine;
};

// k-nearest-neighbour vote over the stored training matrix.
//
// Tie rules are fixed: equal distances order by lower training index; an
// exact vote tie goes to the class with the smaller summed distance among
// the k neighbours, and if that also ties, to label 0.
class Knn : public Classifier {
public:
    explicit Knn(KnnConfig config = {}) : config_(config) {}

    std::string name() const override { return "knn"; }
    void fit(const FeatureMatrix& data) override;
    int predict(const SparseVector& x) const override;
    // Fraction of the k neighbours voting class 1 (used for ROC).
    double predict_score(const SparseVector& x) const override;

    nlohmann::json params_to_json() const override;
    static Knn from_json(const nlohmann::json& j);

    const KnnConfig& config() const { return config_; }

private:
    // (distance, training index) for the k nearest, in vote order.
    std::vector<std::pair<double, std::size_t>> neighbors(const SparseVector& x) const;

    KnnConfig config_;
    FeatureMatrix train_;
};

}  // namespace senti
