#include "senti/features.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "senti/error.hpp"
#include "senti/rng.hpp"

namespace senti {

Vocabulary::Vocabulary(std::vector<std::string> sorted_tokens) : tokens_(std::move(sorted_tokens)) {
    index_.reserve(tokens_.size());
    for (int i = 0; i < static_cast<int>(tokens_.size()); ++i) {
        index_.emplace(tokens_[i], i);
    }
    if (index_.size() != tokens_.size()) throw InputError("vocabulary contains duplicate tokens");
}

std::optional<int> Vocabulary::index_of(const std::string& token) const {
    auto it = index_.find(token);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

void Vocabulary::save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write vocabulary: " + path);
    for (const auto& token : tokens_) out << token << "\n";
}

Vocabulary Vocabulary::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open vocabulary: " + path);
    std::vector<std::string> tokens;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty()) tokens.push_back(line);
    }
    return Vocabulary(std::move(tokens));
}

std::string Vocabulary::content_hash() const {
    std::string joined;
    for (const auto& token : tokens_) {
        joined += token;
        joined += '\n';
    }
    std::uint64_t h = fnv1a64(joined);
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return std::string(buf);
}

std::int64_t SparseVector::sum() const {
    std::int64_t total = 0;
    for (const auto& e : entries) total += e.count;
    return total;
}

Vocabulary build_vocab(const std::vector<TokenizedDoc>& docs, int min_df) {
    if (min_df < 1) throw InputError("build_vocab: min_df must be >= 1");
    std::map<std::string, int> doc_freq;
    for (const auto& doc : docs) {
        std::set<std::string> distinct(doc.begin(), doc.end());
        for (const auto& token : distinct) ++doc_freq[token];
    }
    std::vector<std::string> kept;
    for (const auto& [token, df] : doc_freq) {
        if (df >= min_df) kept.push_back(token);  // map iteration is already lexicographic
    }
    if (kept.empty()) throw InputError("build_vocab: resulting vocabulary is empty");
    return Vocabulary(std::move(kept));
}

SparseVector vectorize(const TokenizedDoc& doc, const Vocabulary& vocab, bool binary) {
    std::map<int, std::int32_t> counts;
    for (const auto& token : doc) {
        if (auto idx = vocab.index_of(token)) ++counts[*idx];
    }
    SparseVector x;
    x.entries.reserve(counts.size());
    for (const auto& [index, count] : counts) {
        x.entries.push_back({index, binary ? 1 : count});
    }
    return x;
}

FeatureMatrix make_feature_matrix(const Corpus& corpus, const PreprocessConfig& prep,
                                  std::shared_ptr<const Vocabulary> vocab, bool binary) {
    FeatureMatrix m;
    m.vocab = std::move(vocab);
    m.rows.reserve(corpus.size());
    m.labels.reserve(corpus.size());
    for (const auto& example : corpus.examples) {
        m.rows.push_back(vectorize(preprocess(example.text, prep), *m.vocab, binary));
        m.labels.push_back(example.label);
    }
    return m;
}

double dot(const SparseVector& x, const std::vector<double>& dense) {
    double acc = 0.0;
    for (const auto& e : x.entries) acc += dense[static_cast<std::size_t>(e.index)] * e.count;
    return acc;
}

double dot(const SparseVector& a, const SparseVector& b) {
    double acc = 0.0;
    std::size_t i = 0, j = 0;
    while (i < a.entries.size() && j < b.entries.size()) {
        if (a.entries[i].index < b.entries[j].index) {
            ++i;
        } else if (a.entries[i].index > b.entries[j].index) {
            ++j;
        } else {
            acc += static_cast<double>(a.entries[i].count) * b.entries[j].count;
            ++i;
            ++j;
        }
    }
    return acc;
}

double l2_norm(const SparseVector& x) {
    double acc = 0.0;
    for (const auto& e : x.entries) acc += static_cast<double>(e.count) * e.count;
    return std::sqrt(acc);
}

double cosine_distance(const SparseVector& a, const SparseVector& b) {
    double na = l2_norm(a), nb = l2_norm(b);
    if (na == 0.0 || nb == 0.0) return 1.0;  // zero vectors have no direction
    return 1.0 - dot(a, b) / (na * nb);
}

double euclidean_distance(const SparseVector& a, const SparseVector& b) {
    double acc = 0.0;
    std::size_t i = 0, j = 0;
    while (i < a.entries.size() || j < b.entries.size()) {
        if (j == b.entries.size() || (i < a.entries.size() && a.entries[i].index < b.entries[j].index)) {
            acc += static_cast<double>(a.entries[i].count) * a.entries[i].count;
            ++i;
        } else if (i == a.entries.size() || b.entries[j].index < a.entries[i].index) {
            acc += static_cast<double>(b.entries[j].count) * b.entries[j].count;
            ++j;
        } else {
            double d = static_cast<double>(a.entries[i].count) - b.entries[j].count;
            acc += d * d;
            ++i;
            ++j;
        }
    }
    return std::sqrt(acc);
}

}  // namespace senti
