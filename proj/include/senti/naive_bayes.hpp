#pragma once

#include "senti/classifier.hpp"

namespace senti {

struct NbConfig {
    double alpha = 1.0;  // Laplace smoothing, > 0
};

// Multinomial Naive Bayes over BoW counts.
//
//   log_prior[c]       = log(n_c / n)
//   log_likelihood[c][w] = log((count(w, c) + alpha) / (total_count(c) + alpha * V))
//
// Scores are computed in log space; predict_score is the softmax of the two
// log-posteriors, i.e. P(y = 1 | x).
class NaiveBayes : public Classifier {
public:
    explicit NaiveBayes(NbConfig config = {}) : config_(config) {}

    std::string name() const override { return "nb"; }
    void fit(const FeatureMatrix& data) override;
    int predict(const SparseVector& x) const override { return predict_score(x) >= 0.5 ? 1 : 0; }
    double predict_score(const SparseVector& x) const override;

    nlohmann::json params_to_json() const override;
    static NaiveBayes from_json(const nlohmann::json& j);

    const std::array<double, 2>& log_prior() const { return log_prior_; }
    const std::array<std::vector<double>, 2>& log_likelihood() const { return log_likelihood_; }

private:
    NbConfig config_;
    std::array<double, 2> log_prior_{0.0, 0.0};
    std::array<std::vector<double>, 2> log_likelihood_;
};

}  // namespace senti
