#pragma once

#include <cstdint>

#include "senti/classifier.hpp"

namespace senti {

struct SvmConfig {
    double lambda = 1e-4;
    int epochs = 100;
    std::uint64_t seed = 0;
};

// Primal linear SVM trained by Pegasos-style per-example subgradient steps:
// labels map {0,1} -> {-1,+1}, the step size at update t is 1/(lambda t),
// and the example order each epoch comes from the seeded "svm.shuffle"
// stream. The bias is updated on margin violations but not regularized.
class LinearSvm : public Classifier {
public:
    explicit LinearSvm(SvmConfig config = {}) : config_(config) {}

    std::string name() const override { return "svm"; }
    void fit(const FeatureMatrix& data) override;
    int predict(const SparseVector& x) const override { return predict_score(x) >= 0.0 ? 1 : 0; }
    // Raw margin w.x + b.
    double predict_score(const SparseVector& x) const override;

    nlohmann::json params_to_json() const override;
    static LinearSvm from_json(const nlohmann::json& j);

    const std::vector<double>& weights() const { return weights_; }
    double bias() const { return bias_; }

private:
    SvmConfig config_;
    std::vector<double> weights_;
    double bias_ = 0.0;
};

// (lambda / 2) ||w||^2 + mean hinge loss; the objective the subgradient
// steps descend, exposed for the grid-search oracle.
double svm_objective(const FeatureMatrix& data, const std::vector<double>& weights, double bias,
                     double lambda);

}  // namespace senti
