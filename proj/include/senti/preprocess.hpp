#pragma once

#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

namespace senti {

using TokenizedDoc = std::vector<std::string>;

// Tokenization, stopword and lemmatization settings.
//
// Suffix rules are ordered (suffix, replacement) pairs; the first rule whose
// suffix matches and whose stem is at least three characters long wins. An
// identity pair such as ("ss", "ss") acts as a guard that stops later rules
// from firing.
struct PreprocessConfig {
    std::unordered_set<std::string> stopwords;
    std::unordered_map<std::string, std::string> lemma_exceptions;
    std::vector<std::pair<std::string, std::string>> suffix_rules;
    std::size_t min_token_len = 1;

    // Bundled English stopwords (179 words), irregular-form table, and the
    // default suffix rules.
    static PreprocessConfig standard();

    // No stopwords, no lemmatization: tokenize only.
    static PreprocessConfig none();

    static std::vector<std::pair<std::string, std::string>> default_suffix_rules();

    // One word per line.
    void load_stopwords(const std::string& path);
    // One "form<TAB>lemma" pair per line.
    void load_lemma_exceptions(const std::string& path);
};

// Lowercases and splits on every maximal run of characters outside [a-z0-9].
// Bytes >= 0x80 count as separators, so output tokens are pure ASCII
// alphanumerics. Tokens shorter than min_token_len are dropped.
std::vector<std::string> tokenize(std::string_view text, std::size_t min_token_len = 1);

std::vector<std::string> remove_stopwords(const std::vector<std::string>& tokens,
                                          const std::unordered_set<std::string>& stopwords);

// Exception table first, then the first applicable suffix rule, else identity.
// A rule with an empty replacement also un-doubles a trailing doubled
// consonant (other than l, s, z): stripping "ing" maps running -> run.
std::string lemmatize(const std::string& token, const PreprocessConfig& config);

// tokenize, then remove_stopwords, then lemmatize each survivor; survivors
// whose lemma lands in the stopword set are dropped as well, so no output
// token is ever a stopword and the pipeline is idempotent on its own
// space-joined output.
TokenizedDoc preprocess(std::string_view text, const PreprocessConfig& config);

}  // namespace senti
