#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "json.hpp"

namespace senti {

// LIME for text: perturb a sentence by deleting word positions, weight each
// perturbation by its proximity to the original, fit a weighted ridge
// surrogate on the keep/drop indicators, and report the top coefficients.
struct LimeConfig {
    int n_samples = 1000;
    double kernel_width = 25.0;  // sigma
    int top_k = 6;
    double ridge = 1.0;  // lambda; the intercept is never penalized
    std::uint64_t seed = 0;
    // Sentences with at most this many words are explained on the full mask
    // enumeration instead of sampled masks.
    int enumerate_max_words = 10;
    // When set, stopword positions are pinned to "kept" and excluded from
    // the surrogate, so the explanation spends its budget on content words.
    bool skip_stopwords = false;
    std::unordered_set<std::string> stopwords;
};

// Binary keep(1)/drop(0) vector over the word positions of the original
// sentence. Duplicate words get independent positions.
struct Perturbation {
    std::vector<std::uint8_t> mask;
};

struct WordWeight {
    int position = 0;
    std::string word;
    double weight = 0.0;
};

struct Explanation {
    std::vector<WordWeight> word_weights;  // |weight| descending
    double intercept = 0.0;
    double local_score = 0.0;     // weighted R^2 of the refit surrogate
    double predicted_proba = 0.0; // black-box P(class 1) on the original text
};

std::vector<std::string> split_words(const std::string& text);

// The first sample is always the all-ones mask. Sampled masks zero a
// uniformly drawn count (1..word_count) of uniformly chosen positions;
// all-zero masks are re-drawn. Short sentences enumerate every non-zero
// mask instead, identity first then ascending bit patterns.
std::vector<Perturbation> make_masks(std::size_t word_count, const LimeConfig& config);

// Original words with the masked positions deleted, joined by single spaces.
std::string apply_mask(const std::vector<std::string>& words, const Perturbation& mask);

// exp(-d^2 / sigma^2) with d = 1 - sqrt(kept / word_count), the cosine
// distance between the mask and the all-ones vector.
double kernel_weight(const Perturbation& mask, double sigma);

// Masks paired with the deletion-perturbed texts they produce.
std::vector<std::pair<Perturbation, std::string>> perturb(const std::string& text,
                                                          const LimeConfig& config);

// Weighted ridge of scores on mask indicators (unpenalized intercept), then
// rank positions by |coefficient|, keep top_k and refit on those columns.
// Requires at least 2 distinct masks.
Explanation fit_surrogate(const std::vector<Perturbation>& masks,
                          const std::vector<double>& scores, const std::vector<double>& weights,
                          const std::vector<std::string>& words, const LimeConfig& config);

using Scorer = std::function<double(const std::string& text)>;

// perturb -> score -> kernel weight -> fit_surrogate. Deterministic given
// (text, scorer, config). Scorer faults are reported with the perturbed
// text that triggered them.
Explanation explain(const std::string& text, const Scorer& scorer, const LimeConfig& config);

nlohmann::json explanation_to_json(const std::string& text, const Explanation& explanation);

// Fig-style signed bar rendering for terminal inspection.
std::string explanation_to_text(const Explanation& explanation);

}  // namespace senti
