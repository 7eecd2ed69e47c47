#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "senti/corpus.hpp"
#include "senti/preprocess.hpp"

namespace senti {

// Frozen token -> index mapping. Indices are assigned in lexicographic
// token order, so the same documents always produce the same vocabulary.
class Vocabulary {
public:
    Vocabulary() = default;
    explicit Vocabulary(std::vector<std::string> sorted_tokens);

    std::optional<int> index_of(const std::string& token) const;
    int size() const { return static_cast<int>(tokens_.size()); }
    const std::vector<std::string>& tokens() const { return tokens_; }

    // One token per line, line number = index.
    void save(const std::string& path) const;
    static Vocabulary load(const std::string& path);

    // FNV-1a over the newline-joined token list; models reference the
    // vocabulary they were fitted with through this hash.
    std::string content_hash() const;

private:
    std::vector<std::string> tokens_;
    std::unordered_map<std::string, int> index_;
};

// Bag-of-words counts: (index, count) with strictly increasing indices and
// counts >= 1.
struct SparseVector {
    struct Entry {
        std::int32_t index;
        std::int32_t count;
        auto operator<=>(const Entry&) const = default;
    };
    std::vector<Entry> entries;

    // Total token count.
    std::int64_t sum() const;
    bool operator==(const SparseVector&) const = default;
};

struct FeatureMatrix {
    std::vector<SparseVector> rows;
    std::vector<int> labels;
    std::shared_ptr<const Vocabulary> vocab;

    std::size_t size() const { return rows.size(); }
};

// Tokens appearing in at least min_df distinct docs, indexed
// lexicographically. Throws if the result is empty.
Vocabulary build_vocab(const std::vector<TokenizedDoc>& docs, int min_df = 1);

// Out-of-vocabulary tokens are dropped. With binary = true every present
// token counts once (the presence view LIME's mask space matches).
SparseVector vectorize(const TokenizedDoc& doc, const Vocabulary& vocab, bool binary = false);

// Preprocess every text and vectorize against vocab; labels carried through.
FeatureMatrix make_feature_matrix(const Corpus& corpus, const PreprocessConfig& prep,
                                  std::shared_ptr<const Vocabulary> vocab, bool binary = false);

double dot(const SparseVector& x, const std::vector<double>& dense);
double dot(const SparseVector& a, const SparseVector& b);
double l2_norm(const SparseVector& x);
double cosine_distance(const SparseVector& a, const SparseVector& b);
double euclidean_distance(const SparseVector& a, const SparseVector& b);

}  // namespace senti
