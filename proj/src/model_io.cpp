#include "senti/model_io.hpp"

#include <fstream>

#include "senti/error.hpp"
#include "senti/knn.hpp"
#include "senti/linear_svm.hpp"
#include "senti/logistic_regression.hpp"
#include "senti/naive_bayes.hpp"
#include "senti/random_forest.hpp"

namespace senti {

namespace {
constexpr int kModelVersion = 1;
}

nlohmann::json model_to_json(const Classifier& model, const Vocabulary& vocab) {
    return {{"model_type", model.name()},
            {"version", kModelVersion},
            {"params", model.params_to_json()},
            {"vocab_hash", vocab.content_hash()}};
}

std::unique_ptr<Classifier> classifier_from_json(const nlohmann::json& j) {
    int version = j.at("version").get<int>();
    if (version != kModelVersion) {
        throw InputError("unsupported model version " + std::to_string(version));
    }
    const std::string type = j.at("model_type").get<std::string>();
    const nlohmann::json& params = j.at("params");
    if (type == "nb") return std::make_unique<NaiveBayes>(NaiveBayes::from_json(params));
    if (type == "lr") {
        return std::make_unique<LogisticRegression>(LogisticRegression::from_json(params));
    }
    if (type == "knn") return std::make_unique<Knn>(Knn::from_json(params));
    if (type == "svm") return std::make_unique<LinearSvm>(LinearSvm::from_json(params));
    if (type == "rf") return std::make_unique<RandomForest>(RandomForest::from_json(params));
    throw InputError("unknown model_type '" + type + "'");
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write file: " + path);
    out << content;
    if (!out) throw InputError("failed writing file: " + path);
}

nlohmann::json read_json_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw InputError(path + ": invalid JSON: " + e.what());
    }
    return j;
}

void save_model_file(const Classifier& model, const Vocabulary& vocab, const std::string& path) {
    write_text_file(path, model_to_json(model, vocab).dump(2) + "\n");
}

LoadedClassifier load_model_file(const std::string& path) {
    nlohmann::json j = read_json_file(path);
    try {
        LoadedClassifier loaded;
        loaded.model = classifier_from_json(j);
        loaded.vocab_hash = j.at("vocab_hash").get<std::string>();
        return loaded;
    } catch (const nlohmann::json::exception& e) {
        throw InputError(path + ": malformed model file: " + e.what());
    }
}

void check_vocab_hash(const LoadedClassifier& loaded, const Vocabulary& vocab,
                      const std::string& vocab_origin) {
    if (vocab.content_hash() != loaded.vocab_hash) {
        throw InputError("vocabulary " + vocab_origin + " (hash " + vocab.content_hash() +
                         ") does not match the model's vocab_hash " + loaded.vocab_hash);
    }
}

}  // namespace senti
