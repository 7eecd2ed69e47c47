#include "senti/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "senti/error.hpp"

namespace senti {

ConfusionMatrix confusion(const std::vector<int>& y_true, const std::vector<int>& y_pred) {
    if (y_true.size() != y_pred.size()) {
        throw InputError("confusion: y_true and y_pred lengths differ (" +
                         std::to_string(y_true.size()) + " vs " + std::to_string(y_pred.size()) + ")");
    }
    if (y_true.empty()) throw InputError("confusion: empty input");
    ConfusionMatrix cm;
    for (std::size_t i = 0; i < y_true.size(); ++i) {
        int t = y_true[i], p = y_pred[i];
        if ((t != 0 && t != 1) || (p != 0 && p != 1)) {
            throw InputError("confusion: labels must be 0 or 1");
        }
        ++cm.n[t][p];
    }
    return cm;
}

double f1_score(double precision, double recall) {
    if (precision + recall == 0.0) return 0.0;
    return 2.0 * precision * recall / (precision + recall);
}

MetricsReport report(const ConfusionMatrix& cm) {
    if (cm.total() < 1) throw InputError("report: empty confusion matrix");
    MetricsReport rep;
    for (int c = 0; c < 2; ++c) {
        ClassMetrics& m = rep.per_class[c];
        std::int64_t pred_c = cm.n[0][c] + cm.n[1][c];
        std::int64_t true_c = cm.n[c][0] + cm.n[c][1];
        std::int64_t tp = cm.n[c][c];
        m.precision_defined = pred_c > 0;
        m.recall_defined = true_c > 0;
        m.precision = m.precision_defined ? static_cast<double>(tp) / pred_c : 0.0;
        m.recall = m.recall_defined ? static_cast<double>(tp) / true_c : 0.0;
        m.f1_defined = m.precision + m.recall > 0.0;
        m.f1 = f1_score(m.precision, m.recall);
    }
    rep.accuracy = static_cast<double>(cm.n[0][0] + cm.n[1][1]) / cm.total();
    rep.macro_precision = (rep.per_class[0].precision + rep.per_class[1].precision) / 2.0;
    rep.macro_recall = (rep.per_class[0].recall + rep.per_class[1].recall) / 2.0;
    rep.macro_f1 = (rep.per_class[0].f1 + rep.per_class[1].f1) / 2.0;
    return rep;
}

RocCurve roc_auc(const std::vector<int>& y_true, const std::vector<double>& scores) {
    if (y_true.size() != scores.size()) throw InputError("roc_auc: lengths differ");
    std::int64_t n_pos = 0, n_neg = 0;
    for (int y : y_true) (y == 1 ? n_pos : n_neg) += 1;
    if (n_pos == 0 || n_neg == 0) {
        throw InputError("roc_auc: both classes must be present in y_true");
    }

    std::vector<std::size_t> order(y_true.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return scores[a] > scores[b];
    });

    RocCurve curve;
    curve.points.emplace_back(0.0, 0.0);
    std::int64_t tp = 0, fp = 0;
    double auc = 0.0;
    double prev_fpr = 0.0, prev_tpr = 0.0;
    std::size_t i = 0;
    while (i < order.size()) {
        // Group all examples sharing this score into one threshold step.
        double s = scores[order[i]];
        while (i < order.size() && scores[order[i]] == s) {
            (y_true[order[i]] == 1 ? tp : fp) += 1;
            ++i;
        }
        double fpr = static_cast<double>(fp) / n_neg;
        double tpr = static_cast<double>(tp) / n_pos;
        auc += (fpr - prev_fpr) * (tpr + prev_tpr) / 2.0;
        curve.points.emplace_back(fpr, tpr);
        prev_fpr = fpr;
        prev_tpr = tpr;
    }
    curve.auc = auc;
    return curve;
}

double round_half_up(double value, int decimals) {
    double scale = std::pow(10.0, decimals);
    return std::floor(value * scale + 0.5) / scale;
}

std::vector<ModelEvaluation> compare_models(const std::vector<ScoredModel>& models,
                                            const Corpus& test) {
    std::vector<int> y_true;
    y_true.reserve(test.size());
    for (const auto& example : test.examples) y_true.push_back(example.label);

    std::vector<ModelEvaluation> evals;
    evals.reserve(models.size());
    for (const auto& model : models) {
        std::vector<int> y_pred;
        std::vector<double> scores;
        y_pred.reserve(test.size());
        scores.reserve(test.size());
        for (const auto& example : test.examples) {
            y_pred.push_back(model.predict(example.text));
            scores.push_back(model.score(example.text));
        }
        ModelEvaluation eval;
        eval.name = model.name;
        eval.metrics = report(confusion(y_true, y_pred));
        eval.auc = roc_auc(y_true, scores).auc;
        evals.push_back(std::move(eval));
    }
    std::sort(evals.begin(), evals.end(), [](const ModelEvaluation& a, const ModelEvaluation& b) {
        if (a.metrics.accuracy != b.metrics.accuracy) return a.metrics.accuracy > b.metrics.accuracy;
        return a.name < b.name;
    });
    return evals;
}

nlohmann::json evaluation_to_json(const ModelEvaluation& eval) {
    nlohmann::json j;
    j["model"] = eval.name;
    j["accuracy"] = eval.metrics.accuracy;
    j["auc"] = eval.auc;
    auto& per_class = j["per_class"] = nlohmann::json::array();
    for (int c = 0; c < 2; ++c) {
        const ClassMetrics& m = eval.metrics.per_class[c];
        per_class.push_back({{"label", c},
                             {"precision", m.precision},
                             {"recall", m.recall},
                             {"f1", m.f1}});
    }
    return j;
}

nlohmann::json comparison_to_json(const std::vector<ModelEvaluation>& evals) {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& eval : evals) j.push_back(evaluation_to_json(eval));
    return j;
}

std::string comparison_to_text(const std::vector<ModelEvaluation>& evals) {
    std::ostringstream out;
    char line[160];
    std::snprintf(line, sizeof(line), "%-14s %-9s %-6s %-6s %-10s %-7s %-5s\n", "model",
                  "accuracy", "auc", "class", "precision", "recall", "f1");
    out << line;
    out << std::string(62, '-') << "\n";
    for (const auto& eval : evals) {
        for (int c = 0; c < 2; ++c) {
            const ClassMetrics& m = eval.metrics.per_class[c];
            bool flagged = !m.precision_defined || !m.recall_defined || !m.f1_defined;
            if (c == 0) {
                std::snprintf(line, sizeof(line), "%-14s %-9.2f %-6.2f %-6d %-10.2f %-7.2f %.2f%s\n",
                              eval.name.c_str(), round_half_up(eval.metrics.accuracy, 2),
                              round_half_up(eval.auc, 2), c, round_half_up(m.precision, 2),
                              round_half_up(m.recall, 2), round_half_up(m.f1, 2), flagged ? " *" : "");
            } else {
                std::snprintf(line, sizeof(line), "%-14s %-9s %-6s %-6d %-10.2f %-7.2f %.2f%s\n", "",
                              "", "", c, round_half_up(m.precision, 2), round_half_up(m.recall, 2),
                              round_half_up(m.f1, 2), flagged ? " *" : "");
            }
            out << line;
        }
    }
    bool any_flagged = false;
    for (const auto& eval : evals) {
        for (const auto& m : eval.metrics.per_class) {
            any_flagged |= !m.precision_defined || !m.recall_defined || !m.f1_defined;
        }
    }
    if (any_flagged) out << "* 0/0 cell reported as 0\n";
    return out.str();
}

}  // namespace senti
