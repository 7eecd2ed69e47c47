#include "senti/lime.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

#include <Eigen/Dense>

#include "senti/error.hpp"
#include "senti/preprocess.hpp"
#include "senti/rng.hpp"

namespace senti {

std::vector<std::string> split_words(const std::string& text) {
    std::istringstream in(text);
    std::vector<std::string> words;
    std::string word;
    while (in >> word) words.push_back(word);
    return words;
}

std::vector<Perturbation> make_masks(std::size_t word_count, const LimeConfig& config) {
    if (word_count == 0) throw InputError("lime: text has no words");
    if (config.n_samples < 2) throw InputError("lime: n_samples must be >= 2");

    std::vector<Perturbation> masks;
    masks.push_back({std::vector<std::uint8_t>(word_count, 1)});  // identity first

    // Enumeration is capped at 20 positions (2^20 masks) no matter what the
    // config asks for; beyond that the bit arithmetic below would overflow.
    std::size_t enumerate_limit =
        std::min<std::size_t>(static_cast<std::size_t>(std::max(config.enumerate_max_words, 0)), 20);
    if (word_count <= enumerate_limit) {
        // Full enumeration of non-zero masks, ascending bit patterns; bit p
        // set means position p kept. The all-ones pattern is already first.
        std::uint32_t full = (1u << word_count) - 1u;
        for (std::uint32_t bits = 1; bits <= full; ++bits) {
            if (bits == full) continue;
            Perturbation mask{std::vector<std::uint8_t>(word_count, 0)};
            for (std::size_t p = 0; p < word_count; ++p) {
                mask.mask[p] = (bits >> p) & 1u;
            }
            masks.push_back(std::move(mask));
        }
        return masks;
    }

    Rng rng = Rng::stream(config.seed, "lime.masks");
    while (masks.size() < static_cast<std::size_t>(config.n_samples)) {
        std::size_t n_zero = 1 + static_cast<std::size_t>(rng.below(word_count));
        if (n_zero == word_count) continue;  // all-zero mask, re-draw
        Perturbation mask{std::vector<std::uint8_t>(word_count, 1)};
        for (std::size_t p : rng.sample_indices(word_count, n_zero)) mask.mask[p] = 0;
        masks.push_back(std::move(mask));
    }
    return masks;
}

std::string apply_mask(const std::vector<std::string>& words, const Perturbation& mask) {
    if (words.size() != mask.mask.size()) throw InputError("lime: mask/word count mismatch");
    std::string out;
    for (std::size_t p = 0; p < words.size(); ++p) {
        if (!mask.mask[p]) continue;
        if (!out.empty()) out += ' ';
        out += words[p];
    }
    return out;
}

double kernel_weight(const Perturbation& mask, double sigma) {
    if (mask.mask.empty()) throw InputError("lime: empty mask");
    std::size_t kept = 0;
    for (std::uint8_t m : mask.mask) kept += m;
    double d = 1.0 - std::sqrt(static_cast<double>(kept) / static_cast<double>(mask.mask.size()));
    return std::exp(-(d * d) / (sigma * sigma));
}

namespace {

struct RidgeFit {
    Eigen::VectorXd coef;  // coef(0) = intercept
};

// Weighted ridge via normal equations; the intercept column is unpenalized.
// The data term is normalized by the total weight so the fit depends only on
// weighted averages: duplicating every sample leaves the solution unchanged
// at any lambda.
RidgeFit solve_weighted_ridge(const std::vector<Perturbation>& masks,
                              const std::vector<std::size_t>& columns,
                              const std::vector<double>& scores,
                              const std::vector<double>& weights, double lambda) {
    const auto dim = static_cast<Eigen::Index>(columns.size()) + 1;
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(dim, dim);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(dim);
    Eigen::VectorXd row(dim);
    double w_total = 0.0;
    for (std::size_t i = 0; i < masks.size(); ++i) {
        row(0) = 1.0;
        for (std::size_t j = 0; j < columns.size(); ++j) {
            row(static_cast<Eigen::Index>(j) + 1) = masks[i].mask[columns[j]];
        }
        a.noalias() += weights[i] * row * row.transpose();
        b.noalias() += weights[i] * scores[i] * row;
        w_total += weights[i];
    }
    a /= w_total;
    b /= w_total;
    for (Eigen::Index j = 1; j < dim; ++j) a(j, j) += lambda;
    RidgeFit fit;
    fit.coef = a.ldlt().solve(b);
    return fit;
}

}  // namespace

Explanation fit_surrogate(const std::vector<Perturbation>& masks,
                          const std::vector<double>& scores, const std::vector<double>& weights,
                          const std::vector<std::string>& words, const LimeConfig& config) {
    if (masks.size() != scores.size() || masks.size() != weights.size()) {
        throw InputError("lime: masks/scores/weights size mismatch");
    }
    if (masks.size() < 2) throw ComputeError("lime: need at least 2 samples");
    const std::size_t n_pos = masks[0].mask.size();
    {
        std::set<std::vector<std::uint8_t>> distinct;
        for (const auto& m : masks) {
            if (m.mask.size() != n_pos) throw InputError("lime: inconsistent mask lengths");
            distinct.insert(m.mask);
        }
        if (distinct.size() < 2) {
            throw ComputeError("lime: degenerate design, all masks identical");
        }
    }

    // Full fit, rank by |coefficient|, keep top_k, refit on the kept columns.
    std::vector<std::size_t> all_columns(n_pos);
    for (std::size_t j = 0; j < n_pos; ++j) all_columns[j] = j;
    RidgeFit full = solve_weighted_ridge(masks, all_columns, scores, weights, config.ridge);

    std::vector<std::size_t> ranked = all_columns;
    std::sort(ranked.begin(), ranked.end(), [&](std::size_t a, std::size_t b) {
        double wa = std::abs(full.coef(static_cast<Eigen::Index>(a) + 1));
        double wb = std::abs(full.coef(static_cast<Eigen::Index>(b) + 1));
        if (wa != wb) return wa > wb;
        return a < b;
    });
    if (ranked.size() > static_cast<std::size_t>(config.top_k)) {
        ranked.resize(static_cast<std::size_t>(config.top_k));
    }
    std::sort(ranked.begin(), ranked.end());

    RidgeFit refit = solve_weighted_ridge(masks, ranked, scores, weights, config.ridge);

    Explanation explanation;
    explanation.intercept = refit.coef(0);
    for (std::size_t j = 0; j < ranked.size(); ++j) {
        WordWeight ww;
        ww.position = static_cast<int>(ranked[j]);
        ww.word = ranked[j] < words.size() ? words[ranked[j]] : "";
        ww.weight = refit.coef(static_cast<Eigen::Index>(j) + 1);
        explanation.word_weights.push_back(std::move(ww));
    }
    std::sort(explanation.word_weights.begin(), explanation.word_weights.end(),
              [](const WordWeight& a, const WordWeight& b) {
                  double wa = std::abs(a.weight), wb = std::abs(b.weight);
                  if (wa != wb) return wa > wb;
                  return a.position < b.position;
              });

    // Weighted R^2 of the refit surrogate.
    double w_sum = 0.0, y_mean = 0.0;
    for (std::size_t i = 0; i < masks.size(); ++i) {
        w_sum += weights[i];
        y_mean += weights[i] * scores[i];
    }
    y_mean /= w_sum;
    double ss_res = 0.0, ss_tot = 0.0;
    for (std::size_t i = 0; i < masks.size(); ++i) {
        double pred = refit.coef(0);
        for (std::size_t j = 0; j < ranked.size(); ++j) {
            pred += refit.coef(static_cast<Eigen::Index>(j) + 1) * masks[i].mask[ranked[j]];
        }
        ss_res += weights[i] * (scores[i] - pred) * (scores[i] - pred);
        ss_tot += weights[i] * (scores[i] - y_mean) * (scores[i] - y_mean);
    }
    explanation.local_score = ss_tot > 1e-30 ? 1.0 - ss_res / ss_tot : 0.0;
    return explanation;
}

std::vector<std::pair<Perturbation, std::string>> perturb(const std::string& text,
                                                          const LimeConfig& config) {
    std::vector<std::string> words = split_words(text);
    if (words.empty()) throw InputError("lime: text has no words");
    std::vector<std::pair<Perturbation, std::string>> samples;
    for (auto& mask : make_masks(words.size(), config)) {
        std::string perturbed = apply_mask(words, mask);
        samples.emplace_back(std::move(mask), std::move(perturbed));
    }
    return samples;
}

Explanation explain(const std::string& text, const Scorer& scorer, const LimeConfig& config) {
    std::vector<std::string> words = split_words(text);
    if (words.empty()) throw InputError("lime: text has no words");

    // Positions the surrogate may vary; all of them unless stopwords are
    // pinned.
    std::vector<std::size_t> active;
    for (std::size_t p = 0; p < words.size(); ++p) {
        if (config.skip_stopwords) {
            auto tokens = tokenize(words[p], 1);
            if (tokens.size() == 1 && config.stopwords.contains(tokens[0])) continue;
        }
        active.push_back(p);
    }
    if (active.empty()) {
        throw ComputeError("lime: every word is a pinned stopword, nothing to explain");
    }

    std::vector<Perturbation> active_masks = make_masks(active.size(), config);

    std::vector<double> scores, weights;
    scores.reserve(active_masks.size());
    weights.reserve(active_masks.size());
    std::vector<std::string> active_words;
    active_words.reserve(active.size());
    for (std::size_t p : active) active_words.push_back(words[p]);

    for (const auto& active_mask : active_masks) {
        Perturbation full{std::vector<std::uint8_t>(words.size(), 1)};
        for (std::size_t j = 0; j < active.size(); ++j) full.mask[active[j]] = active_mask.mask[j];
        std::string perturbed = apply_mask(words, full);

        double score;
        try {
            score = scorer(perturbed);
        } catch (const std::exception& e) {
            throw ComputeError("lime: scorer failed on perturbed text '" + perturbed +
                               "': " + e.what());
        }
        if (!std::isfinite(score) || score < 0.0 || score > 1.0) {
            throw ComputeError("lime: scorer returned " + std::to_string(score) +
                               " outside [0,1] on perturbed text '" + perturbed + "'");
        }
        scores.push_back(score);
        weights.push_back(kernel_weight(active_mask, config.kernel_width));
    }

    Explanation explanation =
        fit_surrogate(active_masks, scores, weights, active_words, config);
    for (auto& ww : explanation.word_weights) {
        std::size_t original = active[static_cast<std::size_t>(ww.position)];
        ww.position = static_cast<int>(original);
        ww.word = words[original];
    }
    explanation.predicted_proba = scores[0];
    return explanation;
}

nlohmann::json explanation_to_json(const std::string& text, const Explanation& explanation) {
    nlohmann::json j;
    j["text"] = text;
    j["predicted_proba"] = explanation.predicted_proba;
    j["intercept"] = explanation.intercept;
    j["local_score"] = explanation.local_score;
    auto& arr = j["word_weights"] = nlohmann::json::array();
    for (const auto& ww : explanation.word_weights) {
        arr.push_back({{"position", ww.position}, {"word", ww.word}, {"weight", ww.weight}});
    }
    return j;
}

std::string explanation_to_text(const Explanation& explanation) {
    std::ostringstream out;
    char line[256];
    std::snprintf(line, sizeof(line), "P(class 1) = %.4f   intercept = %+.4f   local R^2 = %.4f\n",
                  explanation.predicted_proba, explanation.intercept, explanation.local_score);
    out << line;
    double max_abs = 1e-12;
    for (const auto& ww : explanation.word_weights) max_abs = std::max(max_abs, std::abs(ww.weight));
    for (const auto& ww : explanation.word_weights) {
        int bar = static_cast<int>(std::lround(std::abs(ww.weight) / max_abs * 30.0));
        std::snprintf(line, sizeof(line), "%16s  %+.4f  %s%s\n", ww.word.c_str(), ww.weight,
                      ww.weight < 0 ? "-" : "+", std::string(static_cast<std::size_t>(bar), '#').c_str());
        out << line;
    }
    return out.str();
}

}  // namespace senti
