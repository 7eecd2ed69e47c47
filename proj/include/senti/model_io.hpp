#pragma once

#include <memory>
#include <string>

#include "json.hpp"

#include "senti/classifier.hpp"
#include "senti/features.hpp"

namespace senti {

// Classical models serialize to a versioned JSON document:
//   { "model_type": ..., "version": 1, "params": {...}, "vocab_hash": "..." }
// The vocabulary itself lives in its own text file; the hash ties the two
// together so a model is never evaluated against the wrong vocabulary.

nlohmann::json model_to_json(const Classifier& model, const Vocabulary& vocab);

std::unique_ptr<Classifier> classifier_from_json(const nlohmann::json& j);

void save_model_file(const Classifier& model, const Vocabulary& vocab, const std::string& path);

struct LoadedClassifier {
    std::unique_ptr<Classifier> model;
    std::string vocab_hash;
};

LoadedClassifier load_model_file(const std::string& path);

// Throws InputError when the vocabulary does not match the model's hash.
void check_vocab_hash(const LoadedClassifier& loaded, const Vocabulary& vocab,
                      const std::string& vocab_origin);

void write_text_file(const std::string& path, const std::string& content);
nlohmann::json read_json_file(const std::string& path);

}  // namespace senti
