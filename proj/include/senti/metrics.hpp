#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "senti/corpus.hpp"

namespace senti {

struct ConfusionMatrix {
    // n[true][pred]
    std::array<std::array<std::int64_t, 2>, 2> n{{{0, 0}, {0, 0}}};

    std::int64_t total() const { return n[0][0] + n[0][1] + n[1][0] + n[1][1]; }
};

struct ClassMetrics {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    // 0/0 cells are reported as 0 and flagged here instead of NaN.
    bool precision_defined = true;
    bool recall_defined = true;
    bool f1_defined = true;
};

struct MetricsReport {
    std::array<ClassMetrics, 2> per_class;
    double accuracy = 0.0;
    double macro_precision = 0.0;
    double macro_recall = 0.0;
    double macro_f1 = 0.0;
};

struct RocCurve {
    std::vector<std::pair<double, double>> points;  // (fpr, tpr), (0,0) .. (1,1)
    double auc = 0.0;
};

ConfusionMatrix confusion(const std::vector<int>& y_true, const std::vector<int>& y_pred);

MetricsReport report(const ConfusionMatrix& cm);

double f1_score(double precision, double recall);

// Threshold sweep over distinct scores descending, tied scores grouped into
// one step; AUC by the trapezoidal rule (equals Mann-Whitney with ties
// counted half). Requires both classes in y_true.
RocCurve roc_auc(const std::vector<int>& y_true, const std::vector<double>& scores);

// Round-half-up at `decimals` places; rendered tables use 2.
double round_half_up(double value, int decimals);

// A fitted model reduced to the two closures compare needs. `score` is
// P(class 1) for probabilistic models and the raw margin for the SVM.
struct ScoredModel {
    std::string name;
    std::function<int(const std::string& text)> predict;
    std::function<double(const std::string& text)> score;
};

struct ModelEvaluation {
    std::string name;
    MetricsReport metrics;
    double auc = 0.0;
};

// Evaluates every model on the test corpus and sorts by accuracy descending
// (ties by name). Each row pairs per-polarity precision/recall/F1 with
// accuracy and AUC.
std::vector<ModelEvaluation> compare_models(const std::vector<ScoredModel>& models,
                                            const Corpus& test);

nlohmann::json evaluation_to_json(const ModelEvaluation& eval);
nlohmann::json comparison_to_json(const std::vector<ModelEvaluation>& evals);
std::string comparison_to_text(const std::vector<ModelEvaluation>& evals);

}  // namespace senti
