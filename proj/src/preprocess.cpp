#include "senti/preprocess.hpp"

#include <fstream>

#include "senti/error.hpp"

#include "default_lexicons.inc"

namespace senti {

namespace {

constexpr std::size_t kMinStemLen = 3;

bool is_alnum_ascii(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9');
}

char to_lower_ascii(char c) {
    return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
}

bool is_vowel(char c) {
    return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u';
}

// For each non-empty line, hand (line, line_number) to sink.
template <typename Sink>
void for_each_line(std::string_view content, Sink&& sink) {
    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start <= content.size()) {
        std::size_t end = content.find('\n', start);
        if (end == std::string_view::npos) end = content.size();
        std::string_view line = content.substr(start, end - start);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        ++line_no;
        if (!line.empty()) sink(line, line_no);
        if (end == content.size()) break;
        start = end + 1;
    }
}

std::unordered_set<std::string> parse_stopwords(std::string_view content) {
    std::unordered_set<std::string> words;
    for_each_line(content, [&](std::string_view line, std::size_t) {
        words.emplace(line);
    });
    return words;
}

std::unordered_map<std::string, std::string> parse_lemma_exceptions(std::string_view content,
                                                                    const std::string& origin) {
    std::unordered_map<std::string, std::string> table;
    for_each_line(content, [&](std::string_view line, std::size_t line_no) {
        std::size_t tab = line.find('\t');
        if (tab == std::string_view::npos || tab == 0 || tab + 1 == line.size()) {
            throw InputError(origin + ": line " + std::to_string(line_no) +
                             ": expected form<TAB>lemma");
        }
        table.emplace(std::string(line.substr(0, tab)), std::string(line.substr(tab + 1)));
    });
    return table;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open file: " + path);
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

}  // namespace

std::vector<std::pair<std::string, std::string>> PreprocessConfig::default_suffix_rules() {
    // Longest, most specific forms first; "ss" is a guard so class/less keep
    // their final s. The -es family is covered through its sibilant forms
    // (sses/ches/shes/xes); a bare "es" rule would mangle makes/courses.
    return {
        {"sses", "ss"}, {"ings", ""}, {"ches", "ch"}, {"shes", "sh"},
        {"xes", "x"},   {"ies", "y"}, {"ied", "y"},   {"ier", "y"},
        {"ing", ""},    {"ers", ""},  {"er", ""},     {"ed", ""},
        {"ss", "ss"},   {"s", ""},
    };
}

PreprocessConfig PreprocessConfig::standard() {
    PreprocessConfig config;
    config.stopwords = parse_stopwords(kBundledStopwords);
    config.lemma_exceptions = parse_lemma_exceptions(kBundledLemmaExceptions, "bundled lemma table");
    config.suffix_rules = default_suffix_rules();
    return config;
}

PreprocessConfig PreprocessConfig::none() {
    return PreprocessConfig{};
}

void PreprocessConfig::load_stopwords(const std::string& path) {
    stopwords = parse_stopwords(read_file(path));
}

void PreprocessConfig::load_lemma_exceptions(const std::string& path) {
    lemma_exceptions = parse_lemma_exceptions(read_file(path), path);
}

std::vector<std::string> tokenize(std::string_view text, std::size_t min_token_len) {
    std::vector<std::string> tokens;
    std::string current;
    auto flush = [&] {
        if (current.size() >= min_token_len && !current.empty()) tokens.push_back(current);
        current.clear();
    };
    for (char c : text) {
        if (is_alnum_ascii(c)) {
            current += to_lower_ascii(c);
        } else {
            flush();
        }
    }
    flush();
    return tokens;
}

std::vector<std::string> remove_stopwords(const std::vector<std::string>& tokens,
                                          const std::unordered_set<std::string>& stopwords) {
    std::vector<std::string> kept;
    kept.reserve(tokens.size());
    for (const auto& token : tokens) {
        if (!stopwords.contains(token)) kept.push_back(token);
    }
    return kept;
}

std::string lemmatize(const std::string& token, const PreprocessConfig& config) {
    if (auto it = config.lemma_exceptions.find(token); it != config.lemma_exceptions.end()) {
        return it->second;
    }
    for (const auto& [suffix, replacement] : config.suffix_rules) {
        if (token.size() < suffix.size()) continue;
        if (token.compare(token.size() - suffix.size(), suffix.size(), suffix) != 0) continue;
        std::string stem = token.substr(0, token.size() - suffix.size()) + replacement;
        if (stem.size() < kMinStemLen) continue;  // rule not applicable, keep looking
        if (replacement.empty() && stem.size() >= 2) {
            char last = stem[stem.size() - 1];
            if (last == stem[stem.size() - 2] && !is_vowel(last) && last != 'l' &&
                last != 's' && last != 'z') {
                stem.pop_back();
            }
        }
        return stem;
    }
    return token;
}

TokenizedDoc preprocess(std::string_view text, const PreprocessConfig& config) {
    std::vector<std::string> tokens = tokenize(text, config.min_token_len);
    tokens = remove_stopwords(tokens, config.stopwords);
    for (auto& token : tokens) token = lemmatize(token, config);
    // Lemmatization can mint stopwords (owned -> own); filter again so no
    // output token is ever in the stopword set.
    return remove_stopwords(tokens, config.stopwords);
}

}  // namespace senti
