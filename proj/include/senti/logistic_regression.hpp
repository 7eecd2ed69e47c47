#pragma once

#include <cstdint>

#include "senti/classifier.hpp"

namespace senti {

struct LrConfig {
    double learning_rate = 0.1;
    double l2 = 1e-4;  // lambda; the bias is not regularized
    int epochs = 300;
    std::uint64_t seed = 0;  // unused by full-batch descent, kept for interface uniformity
};

// L2-regularized logistic regression trained by full-batch gradient descent
// from zero initialization. Full-batch keeps the loss deterministic and lets
// a finite-difference oracle check the gradient exactly.
class LogisticRegression : public Classifier {
public:
    explicit LogisticRegression(LrConfig config = {}) : config_(config) {}

    std::string name() const override { return "lr"; }
    void fit(const FeatureMatrix& data) override;
    int predict(const SparseVector& x) const override { return predict_score(x) >= 0.5 ? 1 : 0; }
    // sigmoid(w.x + b)
    double predict_score(const SparseVector& x) const override;

    nlohmann::json params_to_json() const override;
    static LogisticRegression from_json(const nlohmann::json& j);

    const std::vector<double>& weights() const { return weights_; }
    double bias() const { return bias_; }
    // Full-batch loss at the start of each epoch (before that epoch's step).
    const std::vector<double>& epoch_losses() const { return epoch_losses_; }

private:
    LrConfig config_;
    std::vector<double> weights_;
    double bias_ = 0.0;
    std::vector<double> epoch_losses_;
};

// Mean cross-entropy plus (l2 / 2) * ||w||^2; exposed so the
// finite-difference oracle evaluates exactly what fit descends.
double lr_loss(const FeatureMatrix& data, const std::vector<double>& weights, double bias,
               double l2);
void lr_gradient(const FeatureMatrix& data, const std::vector<double>& weights, double bias,
                 double l2, std::vector<double>& grad_w, double& grad_b);

}  // namespace senti
