#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>
#include <set>

#include "senti/error.hpp"
#include "senti/lime.hpp"
#include "senti/preprocess.hpp"

using namespace senti;

namespace {

// Dense weighted ridge solve by Gauss-Jordan elimination, independent of the
// library's LDLT path. Column 0 is the unpenalized intercept; the data term
// is normalized by the total weight, the documented objective.
std::vector<double> ridge_oracle(const std::vector<Perturbation>& masks,
                                 const std::vector<double>& scores,
                                 const std::vector<double>& weights, double lambda) {
    const std::size_t d = masks[0].mask.size() + 1;
    std::vector<std::vector<double>> a(d, std::vector<double>(d + 1, 0.0));
    double w_total = 0.0;
    for (std::size_t i = 0; i < masks.size(); ++i) {
        std::vector<double> row(d, 1.0);
        for (std::size_t j = 1; j < d; ++j) row[j] = masks[i].mask[j - 1];
        for (std::size_t r = 0; r < d; ++r) {
            for (std::size_t c = 0; c < d; ++c) a[r][c] += weights[i] * row[r] * row[c];
            a[r][d] += weights[i] * row[r] * scores[i];
        }
        w_total += weights[i];
    }
    for (std::size_t r = 0; r < d; ++r) {
        for (std::size_t c = 0; c <= d; ++c) a[r][c] /= w_total;
    }
    for (std::size_t j = 1; j < d; ++j) a[j][j] += lambda;

    for (std::size_t col = 0; col < d; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < d; ++r) {
            if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
        }
        std::swap(a[col], a[pivot]);
        double diag = a[col][col];
        for (auto& v : a[col]) v /= diag;
        for (std::size_t r = 0; r < d; ++r) {
            if (r == col) continue;
            double factor = a[r][col];
            for (std::size_t c = 0; c <= d; ++c) a[r][c] -= factor * a[col][c];
        }
    }
    std::vector<double> beta(d);
    for (std::size_t r = 0; r < d; ++r) beta[r] = a[r][d];
    return beta;
}

double weight_of(const Explanation& e, int position) {
    for (const auto& ww : e.word_weights) {
        if (ww.position == position) return ww.weight;
    }
    return 0.0;
}

}  // namespace

TEST_CASE("perturb emits the identity mask first and applies masks by deletion") {
    LimeConfig config;
    auto samples = perturb("obe helps", config);
    REQUIRE(!samples.empty());
    CHECK(samples[0].first.mask == std::vector<std::uint8_t>{1, 1});
    CHECK(samples[0].second == "obe helps");

    CHECK(apply_mask({"obe", "helps"}, Perturbation{{1, 0}}) == "obe");
    CHECK(apply_mask({"obe", "helps"}, Perturbation{{0, 1}}) == "helps");
    CHECK(apply_mask({"obe", "helps"}, Perturbation{{0, 0}}) == "");
}

TEST_CASE("short sentences enumerate every non-zero mask exactly once") {
    LimeConfig config;
    auto masks = make_masks(3, config);
    REQUIRE(masks.size() == 7);  // 2^3 - 1, no all-zero mask
    std::set<std::vector<std::uint8_t>> distinct;
    for (const auto& m : masks) {
        CHECK(m.mask.size() == 3);
        std::size_t kept = 0;
        for (auto b : m.mask) kept += b;
        CHECK(kept >= 1);
        distinct.insert(m.mask);
    }
    CHECK(distinct.size() == 7);
    CHECK(masks[0].mask == std::vector<std::uint8_t>{1, 1, 1});
}

TEST_CASE("long sentences sample deterministically from the seed") {
    LimeConfig config;
    config.n_samples = 64;
    config.seed = 42;
    auto a = make_masks(14, config);
    auto b = make_masks(14, config);
    REQUIRE(a.size() == 64);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].mask == b[i].mask);

    config.seed = 43;
    auto c = make_masks(14, config);
    bool identical = true;
    for (std::size_t i = 0; i < a.size(); ++i) identical &= a[i].mask == c[i].mask;
    CHECK(!identical);

    for (const auto& m : a) {
        std::size_t kept = 0;
        for (auto bit : m.mask) kept += bit;
        CHECK(kept >= 1);  // all-zero masks are re-drawn
    }
}

TEST_CASE("kernel weight follows the cosine-distance form") {
    CHECK(kernel_weight(Perturbation{{1, 1, 1, 1}}, 25.0) == doctest::Approx(1.0));
    // 1 of 4 kept: d = 1 - sqrt(0.25) = 0.5
    CHECK(kernel_weight(Perturbation{{1, 0, 0, 0}}, 25.0) ==
          doctest::Approx(std::exp(-0.25 / 625.0)).epsilon(1e-15));
    // monotone nondecreasing in the number of kept words
    double prev = 0.0;
    for (int kept = 1; kept <= 6; ++kept) {
        Perturbation m{std::vector<std::uint8_t>(6, 0)};
        for (int i = 0; i < kept; ++i) m.mask[i] = 1;
        double w = kernel_weight(m, 25.0);
        CHECK(w >= prev);
        prev = w;
    }
}

TEST_CASE("a constant scorer explains to zero weights and its own intercept") {
    LimeConfig config;
    Explanation e = explain("the obe course was fine", [](const std::string&) { return 0.7; },
                            config);
    for (const auto& ww : e.word_weights) CHECK(std::abs(ww.weight) < 1e-9);
    CHECK(e.intercept == doctest::Approx(0.7).epsilon(1e-9));
    CHECK(e.predicted_proba == doctest::Approx(0.7));
    CHECK(e.local_score == doctest::Approx(0.0));  // nothing to explain
}

TEST_CASE("single-word-presence scorer recovers the exact indicator") {
    LimeConfig config;
    config.ridge = 0.0;
    Explanation e = explain(
        "good bad ugly",
        [](const std::string& text) {
            return text.find("good") != std::string::npos ? 1.0 : 0.0;
        },
        config);
    CHECK(weight_of(e, 0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(weight_of(e, 1) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(weight_of(e, 2) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(e.intercept == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(e.local_score == doctest::Approx(1.0).epsilon(1e-12));
    REQUIRE(!e.word_weights.empty());
    CHECK(e.word_weights[0].word == "good");  // ranked first by |weight|
}

TEST_CASE("surrogate coefficients equal the normal-equations oracle") {
    std::mt19937 gen(7);
    std::uniform_real_distribution<double> coef(-0.4, 0.4);
    for (int words = 2; words <= 10; words += 2) {
        LimeConfig config;
        config.top_k = words;  // keep every column so refit equals full fit
        config.ridge = (words % 4 == 0) ? 1.0 : 0.0;

        std::vector<Perturbation> masks = make_masks(static_cast<std::size_t>(words), config);
        std::vector<double> position_effect(static_cast<std::size_t>(words));
        for (auto& v : position_effect) v = coef(gen);

        std::vector<double> scores, weights;
        for (const auto& m : masks) {
            double s = 0.5;
            for (int j = 0; j < words; ++j) s += position_effect[j] * (m.mask[j] ? 0.05 : 0.0);
            scores.push_back(s);
            weights.push_back(kernel_weight(m, config.kernel_width));
        }

        std::vector<std::string> word_list;
        for (int j = 0; j < words; ++j) word_list.push_back("w" + std::to_string(j));
        Explanation e = fit_surrogate(masks, scores, weights, word_list, config);

        std::vector<double> oracle = ridge_oracle(masks, scores, weights, config.ridge);
        CHECK(e.intercept == doctest::Approx(oracle[0]).epsilon(1e-8));
        for (int j = 0; j < words; ++j) {
            CHECK(weight_of(e, j) == doctest::Approx(oracle[j + 1]).epsilon(1e-8));
        }
    }
}

TEST_CASE("rank-then-refit keeps at most top_k positions") {
    LimeConfig config;
    config.top_k = 2;
    config.ridge = 0.0;
    Explanation e = explain(
        "alpha beta gamma delta",
        [](const std::string& text) {
            double s = 0.1;
            if (text.find("alpha") != std::string::npos) s += 0.5;
            if (text.find("beta") != std::string::npos) s += 0.3;
            if (text.find("gamma") != std::string::npos) s += 0.05;
            return s;
        },
        config);
    REQUIRE(e.word_weights.size() == 2);
    CHECK(e.word_weights[0].word == "alpha");
    CHECK(e.word_weights[1].word == "beta");
}

TEST_CASE("explanations are invariant to duplicating every sample") {
    LimeConfig config;
    config.top_k = 3;
    std::vector<Perturbation> masks = make_masks(3, config);
    std::vector<double> scores{0.9, 0.2, 0.4, 0.55, 0.1, 0.35, 0.6};
    std::vector<double> weights;
    for (const auto& m : masks) weights.push_back(kernel_weight(m, config.kernel_width));
    std::vector<std::string> words{"a", "b", "c"};

    Explanation once = fit_surrogate(masks, scores, weights, words, config);

    std::vector<Perturbation> masks2 = masks;
    std::vector<double> scores2 = scores, weights2 = weights;
    masks2.insert(masks2.end(), masks.begin(), masks.end());
    scores2.insert(scores2.end(), scores.begin(), scores.end());
    weights2.insert(weights2.end(), weights.begin(), weights.end());
    Explanation twice = fit_surrogate(masks2, scores2, weights2, words, config);

    CHECK(once.intercept == doctest::Approx(twice.intercept).epsilon(1e-12));
    REQUIRE(once.word_weights.size() == twice.word_weights.size());
    for (std::size_t i = 0; i < once.word_weights.size(); ++i) {
        CHECK(once.word_weights[i].weight ==
              doctest::Approx(twice.word_weights[i].weight).epsilon(1e-12));
    }
    CHECK(once.local_score == doctest::Approx(twice.local_score).epsilon(1e-12));
}

TEST_CASE("monotone scorers get nonnegative coefficients") {
    LimeConfig config;
    Explanation e = explain(
        "helps a lot overall",
        [](const std::string& text) {
            double s = 0.2;
            if (text.find("helps") != std::string::npos) s += 0.6;
            if (text.find("lot") != std::string::npos) s += 0.1;
            return s;
        },
        config);
    CHECK(weight_of(e, 0) >= 0.0);
    CHECK(weight_of(e, 2) >= 0.0);
    CHECK(e.word_weights[0].word == "helps");
}

TEST_CASE("explain is deterministic for a fixed seed on sampled sentences") {
    LimeConfig config;
    config.n_samples = 200;
    config.seed = 9;
    auto scorer = [](const std::string& text) {
        return text.find("good") != std::string::npos ? 0.8 : 0.3;
    };
    std::string text = "a fairly long sentence with the word good somewhere in the middle of it";
    Explanation a = explain(text, scorer, config);
    Explanation b = explain(text, scorer, config);
    REQUIRE(a.word_weights.size() == b.word_weights.size());
    for (std::size_t i = 0; i < a.word_weights.size(); ++i) {
        CHECK(a.word_weights[i].position == b.word_weights[i].position);
        CHECK(a.word_weights[i].weight == b.word_weights[i].weight);
    }
    CHECK(a.word_weights[0].word == "good");
    CHECK(a.word_weights[0].weight > 0.0);

    // without ridge shrinkage the sampled fit recovers the indicator height
    config.ridge = 0.0;
    Explanation exact = explain(text, scorer, config);
    CHECK(exact.word_weights[0].word == "good");
    CHECK(exact.word_weights[0].weight == doctest::Approx(0.5).epsilon(1e-6));
}

TEST_CASE("stopword pinning removes function words from the explanation") {
    LimeConfig config;
    config.skip_stopwords = true;
    config.stopwords = PreprocessConfig::standard().stopwords;
    Explanation e = explain(
        "The course helps",
        [](const std::string& text) {
            return text.find("helps") != std::string::npos ? 0.9 : 0.2;
        },
        config);
    for (const auto& ww : e.word_weights) CHECK(ww.word != "The");
    CHECK(e.word_weights[0].word == "helps");
}

TEST_CASE("error paths: empty text, bad scorer, degenerate design") {
    LimeConfig config;
    CHECK_THROWS_AS(explain("", [](const std::string&) { return 0.5; }, config), InputError);
    CHECK_THROWS_AS(explain("   ", [](const std::string&) { return 0.5; }, config), InputError);
    // single word: only the identity mask exists
    CHECK_THROWS_AS(explain("word", [](const std::string&) { return 0.5; }, config), ComputeError);
    CHECK_THROWS_AS(
        explain("some words here", [](const std::string&) { return 1.5; }, config), ComputeError);
    CHECK_THROWS_AS(explain("some words here",
                            [](const std::string&) -> double { throw std::runtime_error("boom"); },
                            config),
                    ComputeError);
    try {
        explain("alpha beta", [](const std::string& t) -> double {
            if (t == "beta") throw std::runtime_error("scorer fault");
            return 0.5;
        }, config);
        FAIL("expected ComputeError");
    } catch (const ComputeError& e) {
        CHECK(std::string(e.what()).find("beta") != std::string::npos);  // offending text named
    }

    LimeConfig pinned;
    pinned.skip_stopwords = true;
    pinned.stopwords = {"the", "a"};
    CHECK_THROWS_AS(explain("the a", [](const std::string&) { return 0.5; }, pinned),
                    ComputeError);
}

TEST_CASE("explanation JSON and text renderings carry the word weights") {
    LimeConfig config;
    Explanation e = explain(
        "obe helps students",
        [](const std::string& text) {
            return text.find("helps") != std::string::npos ? 0.95 : 0.2;
        },
        config);
    nlohmann::json j = explanation_to_json("obe helps students", e);
    CHECK(j["text"] == "obe helps students");
    CHECK(j["word_weights"].size() == e.word_weights.size());
    CHECK(j["word_weights"][0]["word"] == "helps");
    std::string text = explanation_to_text(e);
    CHECK(text.find("helps") != std::string::npos);
    CHECK(text.find('#') != std::string::npos);
}
