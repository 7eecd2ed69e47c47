#pragma once

#include <memory>
#include <string>

#include "json.hpp"

#include "senti/features.hpp"

namespace senti {

// One fit/predict surface for the five classical models.
//
// predict_score returns P(class 1) for probabilistic models (decision
// threshold 0.5) and a raw margin for the SVM (threshold 0). The vote-based
// models (KNN, random forest) return the voting fraction as their score and
// resolve exact vote ties in predict() by their own documented rules, so at
// score == 0.5 their prediction can be 0.
class Classifier {
public:
    virtual ~Classifier() = default;

    virtual std::string name() const = 0;
    virtual void fit(const FeatureMatrix& data) = 0;
    virtual int predict(const SparseVector& x) const = 0;
    virtual double predict_score(const SparseVector& x) const = 0;

    // Model parameters only; model_type/version/vocabulary envelope is
    // added by model_io.
    virtual nlohmann::json params_to_json() const = 0;
};

void require_both_classes(const FeatureMatrix& data, const std::string& model);

}  // namespace senti
