#include "senti/logistic_regression.hpp"

#include <cmath>

#include "senti/error.hpp"

namespace senti {

namespace {

double sigmoid(double z) {
    if (z >= 0.0) {
        return 1.0 / (1.0 + std::exp(-z));
    }
    double e = std::exp(z);
    return e / (1.0 + e);
}

// log(1 + exp(z)) without overflow
double log1p_exp(double z) {
    if (z > 0.0) return z + std::log1p(std::exp(-z));
    return std::log1p(std::exp(z));
}

}  // namespace

double lr_loss(const FeatureMatrix& data, const std::vector<double>& weights, double bias,
               double l2) {
    double loss = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i) {
        double z = dot(data.rows[i], weights) + bias;
        // -y log(sigmoid) - (1-y) log(1-sigmoid), stably
        loss += data.labels[i] == 1 ? log1p_exp(-z) : log1p_exp(z);
    }
    loss /= static_cast<double>(data.size());
    double reg = 0.0;
    for (double w : weights) reg += w * w;
    return loss + 0.5 * l2 * reg;
}

void lr_gradient(const FeatureMatrix& data, const std::vector<double>& weights, double bias,
                 double l2, std::vector<double>& grad_w, double& grad_b) {
    grad_w.assign(weights.size(), 0.0);
    grad_b = 0.0;
    double inv_n = 1.0 / static_cast<double>(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) {
        double residual = sigmoid(dot(data.rows[i], weights) + bias) - data.labels[i];
        for (const auto& e : data.rows[i].entries) {
            grad_w[static_cast<std::size_t>(e.index)] += inv_n * residual * e.count;
        }
        grad_b += inv_n * residual;
    }
    for (std::size_t j = 0; j < weights.size(); ++j) grad_w[j] += l2 * weights[j];
}

void LogisticRegression::fit(const FeatureMatrix& data) {
    require_both_classes(data, "lr");
    weights_.assign(static_cast<std::size_t>(data.vocab->size()), 0.0);
    bias_ = 0.0;
    epoch_losses_.clear();
    epoch_losses_.reserve(static_cast<std::size_t>(config_.epochs));

    std::vector<double> grad_w;
    double grad_b = 0.0;
    for (int epoch = 0; epoch < config_.epochs; ++epoch) {
        double loss = lr_loss(data, weights_, bias_, config_.l2);
        if (!std::isfinite(loss)) {
            throw ComputeError("lr: non-finite loss at epoch " + std::to_string(epoch) +
                               " (learning rate too large?)");
        }
        epoch_losses_.push_back(loss);
        lr_gradient(data, weights_, bias_, config_.l2, grad_w, grad_b);
        for (std::size_t j = 0; j < weights_.size(); ++j) {
            weights_[j] -= config_.learning_rate * grad_w[j];
        }
        bias_ -= config_.learning_rate * grad_b;
    }
}

double LogisticRegression::predict_score(const SparseVector& x) const {
    return sigmoid(dot(x, weights_) + bias_);
}

nlohmann::json LogisticRegression::params_to_json() const {
    return {{"weights", weights_},
            {"bias", bias_},
            {"learning_rate", config_.learning_rate},
            {"l2", config_.l2},
            {"epochs", config_.epochs},
            {"seed", config_.seed},
            {"epoch_losses", epoch_losses_}};
}

LogisticRegression LogisticRegression::from_json(const nlohmann::json& j) {
    LrConfig config;
    config.learning_rate = j.at("learning_rate").get<double>();
    config.l2 = j.at("l2").get<double>();
    config.epochs = j.at("epochs").get<int>();
    config.seed = j.at("seed").get<std::uint64_t>();
    LogisticRegression model(config);
    j.at("weights").get_to(model.weights_);
    model.bias_ = j.at("bias").get<double>();
    if (j.contains("epoch_losses")) j.at("epoch_losses").get_to(model.epoch_losses_);
    return model;
}

}  // namespace senti
