// senti: sentiment-classification and explanation toolkit.
//
// Subcommands mirror the pipeline stages: summary, prep, train, evaluate,
// compare, explain. Every command that takes --seed is bit-reproducible in
// its file outputs. JSON goes to stdout, human-readable renderings to
// stderr, files to --out.
//
// Exit codes: 0 success, 1 computation failure, 2 usage or input error.

#include <filesystem>
#include <iostream>
#include <memory>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "senti/classifier.hpp"
#include "senti/corpus.hpp"
#include "senti/csv.hpp"
#include "senti/error.hpp"
#include "senti/features.hpp"
#include "senti/knn.hpp"
#include "senti/lime.hpp"
#include "senti/linear_svm.hpp"
#include "senti/logistic_regression.hpp"
#include "senti/metrics.hpp"
#include "senti/model_io.hpp"
#include "senti/naive_bayes.hpp"
#include "senti/random_forest.hpp"
#include "senti/transformer.hpp"

namespace {

using namespace senti;

struct PrepOpts {
    std::string stopwords_path;
    std::string lemma_path;
    std::size_t min_token_len = 1;

    PreprocessConfig build() const {
        PreprocessConfig config = PreprocessConfig::standard();
        if (!stopwords_path.empty()) config.load_stopwords(stopwords_path);
        if (!lemma_path.empty()) config.load_lemma_exceptions(lemma_path);
        config.min_token_len = min_token_len;
        return config;
    }
};

struct ModelOpts {
    double nb_alpha = 1.0;
    double lr_learning_rate = 0.1;
    double lr_l2 = 1e-4;
    int lr_epochs = 300;
    int knn_k = 5;
    std::string knn_metric = "cosine";
    double svm_lambda = 1e-4;
    int svm_epochs = 100;
    int rf_trees = 100;
    int rf_max_depth = 16;
    int rf_features_per_split = 0;
    int rf_threads = 1;
    bool rf_no_bootstrap = false;
    int tf_d_model = 64;
    int tf_heads = 4;
    int tf_layers = 2;
    int tf_d_ff = 128;
    int tf_max_seq_len = 64;
    int tf_epochs = 15;
    int tf_batch_size = 16;
    double tf_learning_rate = 5e-4;
    double tf_weight_decay = 0.01;
    double tf_dropout = 0.0;
};

void add_prep_flags(CLI::App* cmd, PrepOpts& opts) {
    cmd->add_option("--stopwords", opts.stopwords_path,
                    "Stopword list file, one word per line (default: bundled list)");
    cmd->add_option("--lemma-exceptions", opts.lemma_path,
                    "Lemma exception file, form<TAB>lemma per line (default: bundled table)");
    cmd->add_option("--min-token-len", opts.min_token_len, "Minimum token length kept")
        ->capture_default_str();
}

void add_model_flags(CLI::App* cmd, ModelOpts& m) {
    cmd->add_option("--nb.alpha", m.nb_alpha, "Naive Bayes Laplace smoothing")->capture_default_str();
    cmd->add_option("--lr.learning-rate", m.lr_learning_rate, "LR gradient-descent step size")
        ->capture_default_str();
    cmd->add_option("--lr.l2", m.lr_l2, "LR L2 regularization strength")->capture_default_str();
    cmd->add_option("--lr.epochs", m.lr_epochs, "LR full-batch epochs")->capture_default_str();
    cmd->add_option("--knn.k", m.knn_k, "KNN neighbour count")->capture_default_str();
    cmd->add_option("--knn.metric", m.knn_metric, "KNN distance: cosine or euclidean")
        ->capture_default_str()
        ->check(CLI::IsMember({"cosine", "euclidean"}));
    cmd->add_option("--svm.lambda", m.svm_lambda, "SVM regularization lambda")->capture_default_str();
    cmd->add_option("--svm.epochs", m.svm_epochs, "SVM subgradient epochs")->capture_default_str();
    cmd->add_option("--rf.trees", m.rf_trees, "Random forest tree count")->capture_default_str();
    cmd->add_option("--rf.max-depth", m.rf_max_depth, "Tree depth cap, -1 unbounded")
        ->capture_default_str();
    cmd->add_option("--rf.features-per-split", m.rf_features_per_split,
                    "Features tried per split, 0 = ceil(sqrt(V))")
        ->capture_default_str();
    cmd->add_option("--rf.threads", m.rf_threads, "Threads for tree fitting")->capture_default_str();
    cmd->add_flag("--rf.no-bootstrap", m.rf_no_bootstrap, "Train each tree on the full sample");
    cmd->add_option("--transformer.d-model", m.tf_d_model, "Model width")->capture_default_str();
    cmd->add_option("--transformer.heads", m.tf_heads, "Attention heads")->capture_default_str();
    cmd->add_option("--transformer.layers", m.tf_layers, "Encoder layers")->capture_default_str();
    cmd->add_option("--transformer.d-ff", m.tf_d_ff, "Feed-forward width")->capture_default_str();
    cmd->add_option("--transformer.max-seq-len", m.tf_max_seq_len, "Maximum sequence length")
        ->capture_default_str();
    cmd->add_option("--transformer.epochs", m.tf_epochs, "Training epochs")->capture_default_str();
    cmd->add_option("--transformer.batch-size", m.tf_batch_size, "Batch size")->capture_default_str();
    cmd->add_option("--transformer.learning-rate", m.tf_learning_rate, "AdamW learning rate")
        ->capture_default_str();
    cmd->add_option("--transformer.weight-decay", m.tf_weight_decay, "AdamW weight decay")
        ->capture_default_str();
    cmd->add_option("--transformer.dropout", m.tf_dropout, "Dropout rate, 0 disables")
        ->capture_default_str();
}

std::unique_ptr<Classifier> make_classifier(const std::string& name, const ModelOpts& m,
                                            std::uint64_t seed) {
    if (name == "nb") return std::make_unique<NaiveBayes>(NbConfig{m.nb_alpha});
    if (name == "lr") {
        return std::make_unique<LogisticRegression>(
            LrConfig{m.lr_learning_rate, m.lr_l2, m.lr_epochs, seed});
    }
    if (name == "knn") {
        KnnMetric metric = m.knn_metric == "euclidean" ? KnnMetric::euclidean : KnnMetric::cosine;
        return std::make_unique<Knn>(KnnConfig{m.knn_k, metric});
    }
    if (name == "svm") return std::make_unique<LinearSvm>(SvmConfig{m.svm_lambda, m.svm_epochs, seed});
    if (name == "rf") {
        return std::make_unique<RandomForest>(RfConfig{m.rf_trees, m.rf_max_depth,
                                                       m.rf_features_per_split, !m.rf_no_bootstrap,
                                                       seed, m.rf_threads});
    }
    throw InputError("unknown model '" + name + "'");
}

TransformerConfig transformer_config(const ModelOpts& m) {
    return {.vocab_size = 0,
            .d_model = m.tf_d_model,
            .n_heads = m.tf_heads,
            .n_layers = m.tf_layers,
            .d_ff = m.tf_d_ff,
            .max_seq_len = m.tf_max_seq_len,
            .n_classes = 2};
}

TrainConfig transformer_train_config(const ModelOpts& m, std::uint64_t seed) {
    return {.batch_size = m.tf_batch_size,
            .epochs = m.tf_epochs,
            .learning_rate = m.tf_learning_rate,
            .beta1 = 0.9,
            .beta2 = 0.999,
            .epsilon = 1e-8,
            .weight_decay = m.tf_weight_decay,
            .dropout = m.tf_dropout,
            .seed = seed};
}

std::string ensure_out_dir(const std::string& out) {
    std::filesystem::create_directories(out);
    return out;
}

std::string join_path(const std::string& dir, const std::string& name) {
    return (std::filesystem::path(dir) / name).string();
}

Corpus load_clean(const std::string& dataset) {
    if (dataset.empty()) throw InputError("--dataset is required");
    return clean(load_csv(dataset));
}

// Featurize the train split, freeze the vocabulary, fit.
struct FittedClassical {
    std::unique_ptr<Classifier> model;
    std::shared_ptr<const Vocabulary> vocab;
};

FittedClassical fit_classical(const std::string& name, const Corpus& train,
                              const PreprocessConfig& prep, int min_df, const ModelOpts& m,
                              std::uint64_t seed) {
    std::vector<TokenizedDoc> docs;
    docs.reserve(train.size());
    for (const auto& e : train.examples) docs.push_back(preprocess(e.text, prep));
    auto vocab = std::make_shared<Vocabulary>(build_vocab(docs, min_df));
    FeatureMatrix matrix;
    matrix.vocab = vocab;
    matrix.labels.reserve(train.size());
    for (std::size_t i = 0; i < train.size(); ++i) {
        matrix.rows.push_back(vectorize(docs[i], *vocab));
        matrix.labels.push_back(train.examples[i].label);
    }
    FittedClassical fitted;
    fitted.model = make_classifier(name, m, seed);
    fitted.model->fit(matrix);
    fitted.vocab = vocab;
    return fitted;
}

ScoredModel scored_classical(const std::string& name, std::shared_ptr<Classifier> model,
                             std::shared_ptr<const Vocabulary> vocab,
                             std::shared_ptr<const PreprocessConfig> prep) {
    ScoredModel sm;
    sm.name = name;
    sm.predict = [model, vocab, prep](const std::string& text) {
        return model->predict(vectorize(preprocess(text, *prep), *vocab));
    };
    sm.score = [model, vocab, prep](const std::string& text) {
        return model->predict_score(vectorize(preprocess(text, *prep), *vocab));
    };
    return sm;
}

ScoredModel scored_transformer(std::shared_ptr<TrainedTransformer> model) {
    ScoredModel sm;
    sm.name = "transformer";
    sm.predict = [model](const std::string& text) {
        return predict_proba(model->params, text, model->tokenizer)[1] >= 0.5 ? 1 : 0;
    };
    sm.score = [model](const std::string& text) {
        return predict_proba(model->params, text, model->tokenizer)[1];
    };
    return sm;
}

int run_summary(const std::string& dataset, const PrepOpts& prep_opts, std::size_t top_k,
                int bucket_width, const std::string& out) {
    Corpus corpus = load_clean(dataset);
    DatasetSummary summary = summarize(corpus, top_k, prep_opts.build(), bucket_width);
    nlohmann::json j = summary_to_json(summary);
    std::cout << j.dump(2) << "\n";
    std::cerr << summary_to_text(summary);
    if (!out.empty()) {
        ensure_out_dir(out);
        write_text_file(join_path(out, "summary.json"), j.dump(2) + "\n");
        write_text_file(join_path(out, "summary.txt"), summary_to_text(summary));
    }
    return 0;
}

int run_prep(const std::string& dataset, const PrepOpts& prep_opts, const std::string& out) {
    Corpus corpus = load_clean(dataset);
    PreprocessConfig prep = prep_opts.build();
    std::string csv = "text,label\n";
    for (const auto& example : corpus.examples) {
        std::string joined;
        for (const auto& token : preprocess(example.text, prep)) {
            if (!joined.empty()) joined += ' ';
            joined += token;
        }
        csv += csv_escape(joined) + "," + std::to_string(example.label) + "\n";
    }
    if (out.empty()) {
        std::cout << csv;
    } else {
        ensure_out_dir(out);
        write_text_file(join_path(out, "prep.csv"), csv);
        std::cout << join_path(out, "prep.csv") << "\n";
    }
    return 0;
}

int run_train(const std::string& model_name, const std::string& dataset, const PrepOpts& prep_opts,
              const ModelOpts& model_opts, int min_df, double test_fraction, std::uint64_t seed,
              const std::string& out) {
    Corpus corpus = load_clean(dataset);
    auto [train, test] = stratified_split(corpus, {test_fraction, seed, true});
    ensure_out_dir(out);

    if (model_name == "transformer") {
        TrainedTransformer model = train_transformer(train, test, transformer_config(model_opts),
                                                     transformer_train_config(model_opts, seed));
        std::string model_path = join_path(out, "model_transformer.json");
        save_transformer(model, model_path);
        std::string log_path = join_path(out, "train_log.csv");
        write_text_file(log_path, train_log_to_csv(model.log));
        std::cout << model_path << "\n" << log_path << "\n";
        return 0;
    }

    FittedClassical fitted =
        fit_classical(model_name, train, prep_opts.build(), min_df, model_opts, seed);
    std::string model_path = join_path(out, "model_" + model_name + ".json");
    save_model_file(*fitted.model, *fitted.vocab, model_path);
    std::string vocab_path = join_path(out, "vocab.txt");
    fitted.vocab->save(vocab_path);
    std::cout << model_path << "\n" << vocab_path << "\n";
    return 0;
}

// Loads either kind of model file and reduces it to closures. `vocab_path`
// may be empty, defaulting to vocab.txt next to the model file.
ScoredModel load_scored_model(const std::string& model_file, const std::string& vocab_path,
                              const PrepOpts& prep_opts, bool squash_margin) {
    nlohmann::json j = read_json_file(model_file);
    std::string type = j.value("model_type", "");
    if (type == "transformer") {
        auto model = std::make_shared<TrainedTransformer>(transformer_from_json(j));
        return scored_transformer(model);
    }
    LoadedClassifier loaded = load_model_file(model_file);
    std::string resolved = vocab_path;
    if (resolved.empty()) {
        resolved = (std::filesystem::path(model_file).parent_path() / "vocab.txt").string();
    }
    auto vocab = std::make_shared<Vocabulary>(Vocabulary::load(resolved));
    check_vocab_hash(loaded, *vocab, resolved);
    auto prep = std::make_shared<PreprocessConfig>(prep_opts.build());
    std::shared_ptr<Classifier> model(std::move(loaded.model));
    ScoredModel sm = scored_classical(type, model, vocab, prep);
    if (squash_margin && type == "svm") {
        // margins are unbounded; LIME's scorer contract wants [0, 1]
        auto raw = sm.score;
        sm.score = [raw](const std::string& text) {
            return 1.0 / (1.0 + std::exp(-raw(text)));
        };
    }
    return sm;
}

int run_evaluate(const std::string& model_file, const std::string& vocab_path,
                 const std::string& dataset, const PrepOpts& prep_opts, double test_fraction,
                 std::uint64_t seed, const std::string& out) {
    ScoredModel model = load_scored_model(model_file, vocab_path, prep_opts, false);
    Corpus corpus = load_clean(dataset);
    auto [train, test] = stratified_split(corpus, {test_fraction, seed, true});
    auto evals = compare_models({model}, test);
    nlohmann::json j = evaluation_to_json(evals[0]);
    std::cout << j.dump(2) << "\n";
    std::cerr << comparison_to_text(evals);
    if (!out.empty()) {
        ensure_out_dir(out);
        write_text_file(join_path(out, "evaluation.json"), j.dump(2) + "\n");
        write_text_file(join_path(out, "evaluation.txt"), comparison_to_text(evals));
    }
    return 0;
}

int run_compare(const std::string& dataset, const PrepOpts& prep_opts, const ModelOpts& model_opts,
                int min_df, double test_fraction, std::uint64_t seed, const std::string& out) {
    Corpus corpus = load_clean(dataset);
    auto [train, test] = stratified_split(corpus, {test_fraction, seed, true});
    auto prep = std::make_shared<PreprocessConfig>(prep_opts.build());

    std::vector<ScoredModel> models;
    for (const char* name : {"nb", "lr", "rf", "knn", "svm"}) {
        FittedClassical fitted = fit_classical(name, train, *prep, min_df, model_opts, seed);
        models.push_back(
            scored_classical(name, std::shared_ptr<Classifier>(std::move(fitted.model)),
                             fitted.vocab, prep));
    }
    auto transformer = std::make_shared<TrainedTransformer>(train_transformer(
        train, test, transformer_config(model_opts), transformer_train_config(model_opts, seed)));
    models.push_back(scored_transformer(transformer));

    auto evals = compare_models(models, test);
    nlohmann::json j = comparison_to_json(evals);
    std::cout << j.dump(2) << "\n";
    std::cerr << comparison_to_text(evals);
    if (!out.empty()) {
        ensure_out_dir(out);
        write_text_file(join_path(out, "comparison.json"), j.dump(2) + "\n");
        write_text_file(join_path(out, "comparison.txt"), comparison_to_text(evals));
        write_text_file(join_path(out, "train_log.csv"), train_log_to_csv(transformer->log));
    }
    return 0;
}

int run_explain(const std::string& model_file, const std::string& vocab_path,
                const std::string& text, const PrepOpts& prep_opts, const LimeConfig& lime_in,
                const std::string& out) {
    if (text.empty()) throw InputError("--text must be non-empty");
    ScoredModel model = load_scored_model(model_file, vocab_path, prep_opts, true);
    LimeConfig lime = lime_in;
    if (lime.skip_stopwords) lime.stopwords = prep_opts.build().stopwords;

    Explanation explanation = explain(text, model.score, lime);
    nlohmann::json j = explanation_to_json(text, explanation);
    j["model"] = model.name;
    std::cout << j.dump(2) << "\n";
    std::cerr << explanation_to_text(explanation);
    if (!out.empty()) {
        ensure_out_dir(out);
        write_text_file(join_path(out, "explanation.json"), j.dump(2) + "\n");
        write_text_file(join_path(out, "explanation.txt"), explanation_to_text(explanation));
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"senti: sentiment classification and explanation toolkit"};
    app.require_subcommand(1);
    app.set_config("--config", "", "Key=value config file; command-line flags override it");
    app.allow_config_extras(false);

    std::string dataset, out, model_name, model_file, vocab_path, text;
    std::uint64_t seed = 0;
    double test_fraction = 0.2;
    std::size_t top_k = 10;
    int bucket_width = 5;
    int min_df = 1;
    PrepOpts prep_opts;
    ModelOpts model_opts;
    LimeConfig lime;

    CLI::App* summary = app.add_subcommand("summary", "Dataset class/length/word statistics");
    summary->configurable();
    summary->add_option("--dataset", dataset, "CSV with header text,label")->required();
    summary->add_option("--top-k", top_k, "Top words per class")->capture_default_str();
    summary->add_option("--bucket-width", bucket_width, "Length histogram bucket width")
        ->capture_default_str();
    summary->add_option("--out", out, "Directory for summary.json / summary.txt");
    add_prep_flags(summary, prep_opts);

    CLI::App* prep = app.add_subcommand("prep", "Clean and preprocess the dataset to CSV");
    prep->configurable();
    prep->add_option("--dataset", dataset, "CSV with header text,label")->required();
    prep->add_option("--out", out, "Directory for prep.csv (default: stdout)");
    add_prep_flags(prep, prep_opts);

    CLI::App* train = app.add_subcommand("train", "Train one model and serialize it");
    train->configurable();
    train->add_option("--model", model_name, "nb, lr, knn, svm, rf or transformer")
        ->required()
        ->check(CLI::IsMember({"nb", "lr", "knn", "svm", "rf", "transformer"}));
    train->add_option("--dataset", dataset, "CSV with header text,label")->required();
    train->add_option("--out", out, "Output directory")->required();
    train->add_option("--seed", seed, "Seed for every random stream")->capture_default_str();
    train->add_option("--test-fraction", test_fraction, "Held-out fraction")->capture_default_str();
    train->add_option("--min-df", min_df, "Vocabulary document-frequency floor")
        ->capture_default_str();
    add_prep_flags(train, prep_opts);
    add_model_flags(train, model_opts);

    CLI::App* evaluate = app.add_subcommand("evaluate", "Evaluate a model file on the test split");
    evaluate->configurable();
    evaluate->add_option("--model-file", model_file, "Serialized model JSON")->required();
    evaluate->add_option("--dataset", dataset, "CSV with header text,label")->required();
    evaluate->add_option("--vocab", vocab_path, "Vocabulary file (default: vocab.txt next to model)");
    evaluate->add_option("--seed", seed, "Split seed, must match training")->capture_default_str();
    evaluate->add_option("--test-fraction", test_fraction, "Held-out fraction")
        ->capture_default_str();
    evaluate->add_option("--out", out, "Directory for evaluation.json / evaluation.txt");
    add_prep_flags(evaluate, prep_opts);

    CLI::App* compare = app.add_subcommand("compare", "Train all six models and rank them");
    compare->configurable();
    compare->add_option("--dataset", dataset, "CSV with header text,label")->required();
    compare->add_option("--seed", seed, "Seed for every random stream")->capture_default_str();
    compare->add_option("--test-fraction", test_fraction, "Held-out fraction")
        ->capture_default_str();
    compare->add_option("--min-df", min_df, "Vocabulary document-frequency floor")
        ->capture_default_str();
    compare->add_option("--out", out, "Directory for comparison.json / comparison.txt");
    add_prep_flags(compare, prep_opts);
    add_model_flags(compare, model_opts);

    CLI::App* explain_cmd = app.add_subcommand("explain", "LIME word weights for one sentence");
    explain_cmd->configurable();
    explain_cmd->add_option("--model-file", model_file, "Serialized model JSON")->required();
    explain_cmd->add_option("--text", text, "Sentence to explain")->required();
    explain_cmd->add_option("--vocab", vocab_path,
                            "Vocabulary file (default: vocab.txt next to model)");
    explain_cmd->add_option("--seed", seed, "Seed for the mask stream")->capture_default_str();
    explain_cmd->add_option("--lime.samples", lime.n_samples, "Perturbation sample count")
        ->capture_default_str();
    explain_cmd->add_option("--lime.kernel-width", lime.kernel_width, "Proximity kernel width")
        ->capture_default_str();
    explain_cmd->add_option("--lime.top-k", lime.top_k, "Words kept in the explanation")
        ->capture_default_str();
    explain_cmd->add_option("--lime.ridge", lime.ridge, "Surrogate ridge strength")
        ->capture_default_str();
    explain_cmd->add_flag("--lime.skip-stopwords", lime.skip_stopwords,
                          "Pin stopword positions instead of explaining them");
    explain_cmd->add_option("--out", out, "Directory for explanation.json / explanation.txt");
    add_prep_flags(explain_cmd, prep_opts);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);  // prints the message
        return 2;
    }

    try {
        if (app.got_subcommand(summary)) {
            return run_summary(dataset, prep_opts, top_k, bucket_width, out);
        }
        if (app.got_subcommand(prep)) {
            return run_prep(dataset, prep_opts, out);
        }
        if (app.got_subcommand(train)) {
            return run_train(model_name, dataset, prep_opts, model_opts, min_df, test_fraction,
                             seed, out);
        }
        if (app.got_subcommand(evaluate)) {
            return run_evaluate(model_file, vocab_path, dataset, prep_opts, test_fraction, seed,
                                out);
        }
        if (app.got_subcommand(compare)) {
            return run_compare(dataset, prep_opts, model_opts, min_df, test_fraction, seed, out);
        }
        if (app.got_subcommand(explain_cmd)) {
            lime.seed = seed;
            return run_explain(model_file, vocab_path, text, prep_opts, lime, out);
        }
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const ComputeError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
