#include "senti/knn.hpp"

#include <algorithm>

#include "senti/error.hpp"

namespace senti {

void Knn::fit(const FeatureMatrix& data) {
    require_both_classes(data, "knn");
    if (config_.k < 1 || static_cast<std::size_t>(config_.k) > data.size()) {
        throw InputError("knn: k must satisfy 1 <= k <= training size");
    }
    train_ = data;
}

std::vector<std::pair<double, std::size_t>> Knn::neighbors(const SparseVector& x) const {
    std::vector<std::pair<double, std::size_t>> all;
    all.reserve(train_.size());
    for (std::size_t i = 0; i < train_.size(); ++i) {
        double d = config_.metric == KnnMetric::cosine ? cosine_distance(x, train_.rows[i])
                                                       : euclidean_distance(x, train_.rows[i]);
        all.emplace_back(d, i);
    }
    std::size_t k = static_cast<std::size_t>(config_.k);
    std::partial_sort(all.begin(), all.begin() + k, all.end());  // pair order = (distance, index)
    all.resize(k);
    return all;
}

int Knn::predict(const SparseVector& x) const {
    auto near = neighbors(x);
    std::size_t votes[2] = {0, 0};
    double dist_sum[2] = {0.0, 0.0};
    for (const auto& [d, i] : near) {
        int y = train_.labels[i];
        ++votes[y];
        dist_sum[y] += d;
    }
    if (votes[1] != votes[0]) return votes[1] > votes[0] ? 1 : 0;
    if (dist_sum[1] != dist_sum[0]) return dist_sum[1] < dist_sum[0] ? 1 : 0;
    return 0;
}

double Knn::predict_score(const SparseVector& x) const {
    auto near = neighbors(x);
    std::size_t votes_1 = 0;
    for (const auto& [d, i] : near) votes_1 += train_.labels[i] == 1;
    return static_cast<double>(votes_1) / static_cast<double>(near.size());
}

nlohmann::json Knn::params_to_json() const {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : train_.rows) {
        nlohmann::json entries = nlohmann::json::array();
        for (const auto& e : row.entries) entries.push_back({e.index, e.count});
        rows.push_back(std::move(entries));
    }
    return {{"k", config_.k},
            {"metric", config_.metric == KnnMetric::cosine ? "cosine" : "euclidean"},
            {"rows", rows},
            {"labels", train_.labels}};
}

Knn Knn::from_json(const nlohmann::json& j) {
    KnnConfig config;
    config.k = j.at("k").get<int>();
    std::string metric = j.at("metric").get<std::string>();
    if (metric == "cosine") {
        config.metric = KnnMetric::cosine;
    } else if (metric == "euclidean") {
        config.metric = KnnMetric::euclidean;
    } else {
        throw InputError("knn: unknown metric '" + metric + "'");
    }
    Knn model(config);
    for (const auto& row : j.at("rows")) {
        SparseVector x;
        for (const auto& e : row) {
            x.entries.push_back({e.at(0).get<std::int32_t>(), e.at(1).get<std::int32_t>()});
        }
        model.train_.rows.push_back(std::move(x));
    }
    j.at("labels").get_to(model.train_.labels);
    if (model.train_.rows.size() != model.train_.labels.size()) {
        throw InputError("knn: rows/labels size mismatch in model file");
    }
    return model;
}

}  // namespace senti
