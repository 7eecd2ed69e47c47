#include "senti/naive_bayes.hpp"

#include <cmath>

#include "senti/error.hpp"

namespace senti {

void require_both_classes(const FeatureMatrix& data, const std::string& model) {
    bool has[2] = {false, false};
    for (int y : data.labels) {
        if (y != 0 && y != 1) throw InputError(model + ": labels must be 0 or 1");
        has[y] = true;
    }
    if (!has[0] || !has[1]) {
        throw InputError(model + ": training data must contain both classes");
    }
}

void NaiveBayes::fit(const FeatureMatrix& data) {
    if (!(config_.alpha > 0.0)) throw InputError("nb: alpha must be > 0");
    require_both_classes(data, "nb");

    const int vocab_size = data.vocab->size();
    std::array<std::int64_t, 2> class_docs{0, 0};
    std::array<std::int64_t, 2> class_tokens{0, 0};
    std::array<std::vector<std::int64_t>, 2> counts;
    counts[0].assign(vocab_size, 0);
    counts[1].assign(vocab_size, 0);

    for (std::size_t i = 0; i < data.size(); ++i) {
        int y = data.labels[i];
        ++class_docs[y];
        for (const auto& e : data.rows[i].entries) {
            counts[y][static_cast<std::size_t>(e.index)] += e.count;
            class_tokens[y] += e.count;
        }
    }

    for (int c = 0; c < 2; ++c) {
        log_prior_[c] = std::log(static_cast<double>(class_docs[c]) / data.size());
        log_likelihood_[c].resize(vocab_size);
        double denom = static_cast<double>(class_tokens[c]) + config_.alpha * vocab_size;
        for (int w = 0; w < vocab_size; ++w) {
            log_likelihood_[c][w] = std::log((counts[c][w] + config_.alpha) / denom);
        }
    }
}

double NaiveBayes::predict_score(const SparseVector& x) const {
    double log_posterior[2];
    for (int c = 0; c < 2; ++c) {
        double acc = log_prior_[c];
        for (const auto& e : x.entries) {
            acc += e.count * log_likelihood_[c][static_cast<std::size_t>(e.index)];
        }
        log_posterior[c] = acc;
    }
    // P(1 | x) = 1 / (1 + exp(l0 - l1))
    return 1.0 / (1.0 + std::exp(log_posterior[0] - log_posterior[1]));
}

nlohmann::json NaiveBayes::params_to_json() const {
    return {{"alpha", config_.alpha},
            {"log_prior", log_prior_},
            {"log_likelihood", log_likelihood_}};
}

NaiveBayes NaiveBayes::from_json(const nlohmann::json& j) {
    NaiveBayes model(NbConfig{j.at("alpha").get<double>()});
    j.at("log_prior").get_to(model.log_prior_);
    j.at("log_likelihood").get_to(model.log_likelihood_);
    return model;
}

}  // namespace senti
