#include "senti/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "senti/csv.hpp"
#include "senti/error.hpp"
#include "senti/rng.hpp"

namespace senti {

namespace {

std::string trim(const std::string& s) {
    std::size_t begin = s.find_first_not_of(" \t\r\n\f\v");
    if (begin == std::string::npos) return "";
    std::size_t end = s.find_last_not_of(" \t\r\n\f\v");
    return s.substr(begin, end - begin + 1);
}

std::size_t whitespace_word_count(const std::string& text) {
    std::istringstream in(text);
    std::string word;
    std::size_t n = 0;
    while (in >> word) ++n;
    return n;
}

std::size_t round_half_up(double x) {
    return static_cast<std::size_t>(std::floor(x + 0.5));
}

}  // namespace

Corpus corpus_from_csv_content(const std::string& content, const std::string& origin) {
    auto records = parse_csv(content);
    if (records.empty()) throw InputError(origin + ": empty file, expected header text,label");

    const auto& header = records[0];
    if (header.size() != 2) {
        throw InputError(origin + ": expected exactly two columns named text and label");
    }
    int text_col;
    if (header[0] == "text" && header[1] == "label") {
        text_col = 0;
    } else if (header[0] == "label" && header[1] == "text") {
        text_col = 1;
    } else {
        throw InputError(origin + ": header must name columns text and label, got '" +
                         header[0] + "," + header[1] + "'");
    }

    Corpus corpus;
    corpus.examples.reserve(records.size() - 1);
    for (std::size_t r = 1; r < records.size(); ++r) {
        const auto& row = records[r];
        std::size_t row_no = r + 1;  // header is row 1
        if (row.size() != 2) {
            throw InputError(origin + ": row " + std::to_string(row_no) + ": expected 2 fields, got " +
                             std::to_string(row.size()));
        }
        const std::string& label_field = trim(row[1 - text_col]);
        int label;
        if (label_field == "0") {
            label = 0;
        } else if (label_field == "1") {
            label = 1;
        } else {
            throw InputError(origin + ": row " + std::to_string(row_no) + ": label must be 0 or 1, got '" +
                             label_field + "'");
        }
        corpus.examples.push_back({row[text_col], label});
    }
    return corpus;
}

Corpus load_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open dataset: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return corpus_from_csv_content(buf.str(), path);
}

Corpus clean(const Corpus& corpus) {
    Corpus out;
    out.examples.reserve(corpus.size());
    std::unordered_set<std::string> seen;
    for (const auto& example : corpus.examples) {
        if (trim(example.text).empty()) continue;
        if (!seen.insert(example.text).second) continue;
        out.examples.push_back(example);
    }
    return out;
}

std::pair<Corpus, Corpus> stratified_split(const Corpus& corpus, const SplitConfig& config) {
    if (!(config.test_fraction > 0.0 && config.test_fraction < 1.0)) {
        throw InputError("test_fraction must lie in (0, 1)");
    }

    Rng rng = Rng::stream(config.seed, "split");
    std::vector<std::size_t> test_indices;

    if (config.stratified) {
        // Fixed class order (0 then 1) so the stream is stable.
        std::map<int, std::vector<std::size_t>> by_class;
        for (std::size_t i = 0; i < corpus.size(); ++i) {
            by_class[corpus.examples[i].label].push_back(i);
        }
        for (auto& [label, indices] : by_class) {
            if (indices.size() < 2) {
                throw InputError("stratified split requires at least 2 examples of class " +
                                 std::to_string(label) + ", got " + std::to_string(indices.size()));
            }
            std::size_t n_test = round_half_up(static_cast<double>(indices.size()) * config.test_fraction);
            rng.shuffle(indices);
            test_indices.insert(test_indices.end(), indices.begin(), indices.begin() + n_test);
        }
    } else {
        if (corpus.size() < 2) throw InputError("split requires at least 2 examples");
        std::vector<std::size_t> indices(corpus.size());
        for (std::size_t i = 0; i < indices.size(); ++i) indices[i] = i;
        std::size_t n_test = round_half_up(static_cast<double>(corpus.size()) * config.test_fraction);
        rng.shuffle(indices);
        test_indices.assign(indices.begin(), indices.begin() + n_test);
    }

    std::vector<bool> in_test(corpus.size(), false);
    for (std::size_t i : test_indices) in_test[i] = true;

    std::pair<Corpus, Corpus> split;
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        (in_test[i] ? split.second : split.first).examples.push_back(corpus.examples[i]);
    }
    return split;
}

DatasetSummary summarize(const Corpus& corpus, std::size_t top_k,
                         const PreprocessConfig& prep, int bucket_width) {
    if (corpus.empty()) throw InputError("summarize: corpus is empty");
    if (bucket_width < 1) throw InputError("summarize: bucket_width must be >= 1");

    DatasetSummary summary;
    summary.bucket_width = bucket_width;

    std::map<int, std::size_t> buckets;
    std::map<int, std::unordered_map<std::string, std::size_t>> word_counts;
    for (const auto& example : corpus.examples) {
        ++summary.class_counts[example.label];
        int bucket = static_cast<int>(whitespace_word_count(example.text)) / bucket_width * bucket_width;
        ++buckets[bucket];
        for (const auto& token : preprocess(example.text, prep)) {
            ++word_counts[example.label][token];
        }
    }
    summary.length_histogram.assign(buckets.begin(), buckets.end());

    for (const auto& [label, counts] : word_counts) {
        std::vector<std::pair<std::string, std::size_t>> ranked(counts.begin(), counts.end());
        std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
            if (a.second != b.second) return a.second > b.second;
            return a.first < b.first;
        });
        if (ranked.size() > top_k) ranked.resize(top_k);
        summary.top_words[label] = std::move(ranked);
    }
    return summary;
}

nlohmann::json summary_to_json(const DatasetSummary& summary) {
    nlohmann::json j;
    for (const auto& [label, count] : summary.class_counts) {
        j["class_counts"][std::to_string(label)] = count;
    }
    j["bucket_width"] = summary.bucket_width;
    auto& hist = j["length_histogram"] = nlohmann::json::array();
    for (const auto& [bucket, count] : summary.length_histogram) {
        hist.push_back({bucket, count});
    }
    j["top_words"] = nlohmann::json::object();
    for (const auto& [label, words] : summary.top_words) {
        auto& arr = j["top_words"][std::to_string(label)] = nlohmann::json::array();
        for (const auto& [word, count] : words) {
            arr.push_back({word, count});
        }
    }
    return j;
}

std::string summary_to_text(const DatasetSummary& summary) {
    std::ostringstream out;
    out << "class counts:\n";
    for (const auto& [label, count] : summary.class_counts) {
        out << "  " << label << ": " << count << "\n";
    }
    out << "text length (words, bucket width " << summary.bucket_width << "):\n";
    for (const auto& [bucket, count] : summary.length_histogram) {
        out << "  " << bucket << "-" << bucket + summary.bucket_width - 1 << ": " << count << "\n";
    }
    for (const auto& [label, words] : summary.top_words) {
        out << "top words, class " << label << ":\n";
        for (const auto& [word, count] : words) {
            out << "  " << word << " " << count << "\n";
        }
    }
    return out.str();
}

}  // namespace senti
