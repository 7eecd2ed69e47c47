#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <memory>
#include <random>

#include "senti/error.hpp"
#include "senti/linear_svm.hpp"
#include "senti/logistic_regression.hpp"
#include "senti/model_io.hpp"

using namespace senti;

namespace {

FeatureMatrix matrix_from(std::vector<std::vector<int>> dense, std::vector<int> labels) {
    std::vector<std::string> tokens;
    for (std::size_t j = 0; j < dense[0].size(); ++j) tokens.push_back("w" + std::to_string(j));
    FeatureMatrix m;
    m.vocab = std::make_shared<Vocabulary>(std::move(tokens));
    for (const auto& row : dense) {
        SparseVector x;
        for (std::size_t j = 0; j < row.size(); ++j) {
            if (row[j] > 0) x.entries.push_back({static_cast<std::int32_t>(j), row[j]});
        }
        m.rows.push_back(std::move(x));
    }
    m.labels = std::move(labels);
    return m;
}

// Two features, each class keyed to one of them; linearly separable.
FeatureMatrix separable_four() {
    return matrix_from({{1, 0}, {2, 0}, {0, 1}, {0, 2}}, {1, 1, 0, 0});
}

}  // namespace

TEST_CASE("lr with zero epochs scores one half everywhere") {
    FeatureMatrix data = separable_four();
    LogisticRegression lr({.learning_rate = 0.1, .l2 = 0.0, .epochs = 0});
    lr.fit(data);
    for (const auto& row : data.rows) CHECK(lr.predict_score(row) == doctest::Approx(0.5));
    CHECK(lr.predict_score(SparseVector{}) == 0.5);
}

TEST_CASE("lr separates the separable four-point set") {
    FeatureMatrix data = separable_four();
    LogisticRegression lr({.learning_rate = 0.5, .l2 = 0.0, .epochs = 500});
    lr.fit(data);
    for (std::size_t i = 0; i < data.size(); ++i) {
        CHECK(lr.predict(data.rows[i]) == data.labels[i]);
    }
    // weights must implement a separating line: positive on w0, negative on w1
    CHECK(lr.weights()[0] > 0.0);
    CHECK(lr.weights()[1] < 0.0);
}

TEST_CASE("lr analytic gradient matches central finite differences") {
    std::mt19937 gen(314);
    std::uniform_real_distribution<double> weight(-2.0, 2.0);
    std::uniform_int_distribution<int> count(0, 3);
    std::uniform_real_distribution<double> l2_draw(0.0, 0.5);

    const double h = 1e-5;
    int checked_points = 0;
    for (int trial = 0; trial < 25; ++trial) {
        std::vector<std::vector<int>> dense;
        std::vector<int> labels;
        for (int i = 0; i < 6; ++i) {
            dense.push_back({count(gen), count(gen), count(gen), count(gen)});
            labels.push_back(i % 2);
        }
        FeatureMatrix data = matrix_from(dense, labels);
        std::vector<double> w{weight(gen), weight(gen), weight(gen), weight(gen)};
        double b = weight(gen);
        double l2 = l2_draw(gen);

        std::vector<double> grad_w;
        double grad_b;
        lr_gradient(data, w, b, l2, grad_w, grad_b);

        for (std::size_t j = 0; j <= w.size(); ++j) {
            double analytic;
            double plus, minus;
            if (j < w.size()) {
                analytic = grad_w[j];
                std::vector<double> wp = w, wm = w;
                wp[j] += h;
                wm[j] -= h;
                plus = lr_loss(data, wp, b, l2);
                minus = lr_loss(data, wm, b, l2);
            } else {
                analytic = grad_b;
                plus = lr_loss(data, w, b + h, l2);
                minus = lr_loss(data, w, b - h, l2);
            }
            double numeric = (plus - minus) / (2.0 * h);
            double rel = std::abs(analytic - numeric) /
                         std::max({std::abs(analytic), std::abs(numeric), 1e-4});
            CHECK(rel < 1e-5);
        }
        ++checked_points;
    }
    CHECK(checked_points >= 20);
}

TEST_CASE("lr full-batch loss is non-increasing at a small learning rate") {
    FeatureMatrix data = matrix_from({{3, 0, 1}, {1, 1, 0}, {0, 2, 1}, {0, 1, 3}}, {1, 1, 0, 0});
    LogisticRegression lr({.learning_rate = 0.01, .l2 = 1e-4, .epochs = 200});
    lr.fit(data);
    const auto& losses = lr.epoch_losses();
    REQUIRE(losses.size() == 200);
    CHECK(losses.front() == doctest::Approx(std::log(2.0)));  // zero weights
    for (std::size_t i = 1; i < losses.size(); ++i) {
        CHECK(losses[i] <= losses[i - 1] + 1e-12);
    }
}

TEST_CASE("lr reports divergence instead of clamping") {
    FeatureMatrix data = separable_four();
    LogisticRegression lr({.learning_rate = 1e160, .l2 = 0.0, .epochs = 5});
    CHECK_THROWS_AS(lr.fit(data), ComputeError);
}

TEST_CASE("lr round-trips through model JSON") {
    FeatureMatrix data = separable_four();
    LogisticRegression lr({.learning_rate = 0.3, .l2 = 1e-3, .epochs = 50});
    lr.fit(data);
    auto restored = classifier_from_json(model_to_json(lr, *data.vocab));
    for (const auto& row : data.rows) {
        CHECK(restored->predict_score(row) == lr.predict_score(row));
    }
}

TEST_CASE("svm with zero epochs has zero margin everywhere") {
    FeatureMatrix data = separable_four();
    LinearSvm svm({.lambda = 1e-4, .epochs = 0});
    svm.fit(data);
    for (const auto& row : data.rows) CHECK(svm.predict_score(row) == 0.0);
    CHECK(svm.predict(data.rows[0]) == 1);  // margin 0 sits on the >= 0 side
}

TEST_CASE("svm separates the two-point set") {
    FeatureMatrix data = matrix_from({{1, 0}, {0, 1}}, {1, 0});
    LinearSvm svm({.lambda = 1e-4, .epochs = 100, .seed = 4});
    svm.fit(data);
    CHECK(svm.predict(data.rows[0]) == 1);
    CHECK(svm.predict(data.rows[1]) == 0);
    CHECK(svm.predict_score(data.rows[0]) > 0.0);
    CHECK(svm.predict_score(data.rows[1]) < 0.0);
}

TEST_CASE("svm objective lands within 5% of a grid-search optimum") {
    FeatureMatrix data = separable_four();
    const double lambda = 0.1;
    LinearSvm svm({.lambda = lambda, .epochs = 4000, .seed = 11});
    svm.fit(data);
    double achieved = svm_objective(data, svm.weights(), svm.bias(), lambda);

    double best = std::numeric_limits<double>::infinity();
    const double lo = -3.0, hi = 3.0, step = 0.05;
    std::vector<double> w(2);
    for (w[0] = lo; w[0] <= hi + 1e-9; w[0] += step) {
        for (w[1] = lo; w[1] <= hi + 1e-9; w[1] += step) {
            for (double b = lo; b <= hi + 1e-9; b += step) {
                best = std::min(best, svm_objective(data, w, b, lambda));
            }
        }
    }
    CHECK(achieved <= best * 1.05);
}

TEST_CASE("svm training is a deterministic function of the seed") {
    FeatureMatrix data = matrix_from({{2, 0, 1}, {1, 0, 0}, {0, 1, 1}, {0, 2, 0}, {1, 1, 1}},
                                     {1, 1, 0, 0, 1});
    LinearSvm a({.lambda = 1e-3, .epochs = 40, .seed = 9});
    LinearSvm b({.lambda = 1e-3, .epochs = 40, .seed = 9});
    a.fit(data);
    b.fit(data);
    CHECK(a.weights() == b.weights());
    CHECK(a.bias() == b.bias());

    LinearSvm c({.lambda = 1e-3, .epochs = 40, .seed = 10});
    c.fit(data);
    CHECK(a.weights() != c.weights());
}

TEST_CASE("svm round-trips through model JSON") {
    FeatureMatrix data = separable_four();
    LinearSvm svm({.lambda = 1e-3, .epochs = 60, .seed = 2});
    svm.fit(data);
    auto restored = classifier_from_json(model_to_json(svm, *data.vocab));
    for (const auto& row : data.rows) {
        CHECK(restored->predict_score(row) == svm.predict_score(row));
    }
}
