#include "senti/linear_svm.hpp"

#include <algorithm>
#include <cmath>

#include "senti/error.hpp"
#include "senti/rng.hpp"

namespace senti {

double svm_objective(const FeatureMatrix& data, const std::vector<double>& weights, double bias,
                     double lambda) {
    double hinge = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i) {
        double y = data.labels[i] == 1 ? 1.0 : -1.0;
        hinge += std::max(0.0, 1.0 - y * (dot(data.rows[i], weights) + bias));
    }
    hinge /= static_cast<double>(data.size());
    double norm_sq = 0.0;
    for (double w : weights) norm_sq += w * w;
    return 0.5 * lambda * norm_sq + hinge;
}

void LinearSvm::fit(const FeatureMatrix& data) {
    require_both_classes(data, "svm");
    if (!(config_.lambda > 0.0)) throw InputError("svm: lambda must be > 0");

    weights_.assign(static_cast<std::size_t>(data.vocab->size()), 0.0);
    bias_ = 0.0;

    Rng rng = Rng::stream(config_.seed, "svm.shuffle");
    std::vector<std::size_t> order(data.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

    std::int64_t t = 1;
    for (int epoch = 0; epoch < config_.epochs; ++epoch) {
        rng.shuffle(order);
        for (std::size_t i : order) {
            double eta = 1.0 / (config_.lambda * static_cast<double>(t));
            double y = data.labels[i] == 1 ? 1.0 : -1.0;
            bool violates = y * (dot(data.rows[i], weights_) + bias_) < 1.0;
            double shrink = 1.0 - eta * config_.lambda;
            for (double& w : weights_) w *= shrink;
            if (violates) {
                for (const auto& e : data.rows[i].entries) {
                    weights_[static_cast<std::size_t>(e.index)] += eta * y * e.count;
                }
                bias_ += eta * y;
            }
            ++t;
        }
    }
}

double LinearSvm::predict_score(const SparseVector& x) const {
    return dot(x, weights_) + bias_;
}

nlohmann::json LinearSvm::params_to_json() const {
    return {{"weights", weights_},
            {"bias", bias_},
            {"lambda", config_.lambda},
            {"epochs", config_.epochs},
            {"seed", config_.seed}};
}

LinearSvm LinearSvm::from_json(const nlohmann::json& j) {
    SvmConfig config;
    config.lambda = j.at("lambda").get<double>();
    config.epochs = j.at("epochs").get<int>();
    config.seed = j.at("seed").get<std::uint64_t>();
    LinearSvm model(config);
    j.at("weights").get_to(model.weights_);
    model.bias_ = j.at("bias").get<double>();
    return model;
}

}  // namespace senti
