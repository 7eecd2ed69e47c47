#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "senti/preprocess.hpp"

namespace senti {

// One feedback sentence; label 0 = negative, 1 = positive.
struct LabeledExample {
    std::string text;
    int label = 0;
};

struct Corpus {
    std::vector<LabeledExample> examples;

    std::size_t size() const { return examples.size(); }
    bool empty() const { return examples.empty(); }
};

struct SplitConfig {
    double test_fraction = 0.2;  // in (0, 1)
    std::uint64_t seed = 0;
    bool stratified = true;
};

struct DatasetSummary {
    std::map<int, std::size_t> class_counts;
    // (bucket lower bound, count) ascending; only non-empty buckets appear.
    std::vector<std::pair<int, std::size_t>> length_histogram;
    int bucket_width = 5;
    // Per class, (word, frequency) sorted by frequency desc then word asc.
    std::map<int, std::vector<std::pair<std::string, std::size_t>>> top_words;
};

// Reads a UTF-8 CSV with header `text,label` (either column order,
// RFC-4180 quoting). The label column must hold a literal 0 or 1; anything
// else is rejected with its row number. Rows are numbered from 1 = header.
Corpus load_csv(const std::string& path);
Corpus corpus_from_csv_content(const std::string& content, const std::string& origin);

// Drops rows whose text is empty after trimming whitespace, then keeps only
// the first occurrence of each exact text. Order is preserved; cleaning is
// total and idempotent.
Corpus clean(const Corpus& corpus);

// Per class, test receives round-half-up(class_count * test_fraction)
// examples chosen by the seeded "split" stream; both halves keep the
// corpus order. Requires every class to have at least 2 examples when
// stratified. With stratified = false a single global draw is used.
std::pair<Corpus, Corpus> stratified_split(const Corpus& corpus, const SplitConfig& config);

// Class counts, a text-length histogram over whitespace-delimited word
// counts, and per-class top-k most frequent post-preprocessing tokens.
DatasetSummary summarize(const Corpus& corpus, std::size_t top_k,
                         const PreprocessConfig& prep, int bucket_width = 5);

nlohmann::json summary_to_json(const DatasetSummary& summary);
std::string summary_to_text(const DatasetSummary& summary);

}  // namespace senti
