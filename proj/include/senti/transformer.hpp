#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"

#include "senti/corpus.hpp"

namespace senti {

// A small trainable transformer-encoder sentence classifier: embeddings with
// learned positions, post-norm encoder blocks (masked multi-head attention,
// GELU feed-forward), CLS pooling and a linear head. Everything runs in
// double precision with exact analytic gradients so finite differences can
// check every parameter group.
struct TransformerConfig {
    int vocab_size = 0;  // 0: filled in from the tokenizer by train()
    int d_model = 64;
    int n_heads = 4;
    int n_layers = 2;
    int d_ff = 128;
    int max_seq_len = 64;
    int n_classes = 2;
};

// Word-level tokenizer with fixed special ids CLS=0, PAD=1, UNK=2. Words are
// drawn from the training texts (alphanumeric lowercase splitting) and take
// ids 3.. in lexicographic order.
class EncoderTokenizer {
public:
    static constexpr int kCls = 0;
    static constexpr int kPad = 1;
    static constexpr int kUnk = 2;

    static EncoderTokenizer build(const std::vector<std::string>& texts);
    static EncoderTokenizer from_words(std::vector<std::string> words);

    int id_of(const std::string& word) const;
    const std::vector<std::string>& words() const { return words_; }
    int vocab_size() const { return static_cast<int>(words_.size()) + 3; }

private:
    std::vector<std::string> words_;
    std::unordered_map<std::string, int> ids_;
};

// All tensors are row-major-serialized Eigen matrices; vectors (biases,
// layer-norm gains/shifts) are stored 1 x N so one visitor covers everything.
struct LayerParams {
    Eigen::MatrixXd wq, wk, wv, wo;      // d_model x d_model
    Eigen::MatrixXd ffn_w1, ffn_b1;      // d_model x d_ff, 1 x d_ff
    Eigen::MatrixXd ffn_w2, ffn_b2;      // d_ff x d_model, 1 x d_model
    Eigen::MatrixXd ln1_gain, ln1_bias;  // 1 x d_model
    Eigen::MatrixXd ln2_gain, ln2_bias;
};

struct TransformerParams {
    TransformerConfig config;
    Eigen::MatrixXd token_embedding;  // vocab_size x d_model
    Eigen::MatrixXd pos_embedding;    // max_seq_len x d_model
    std::vector<LayerParams> layers;
    Eigen::MatrixXd head_w;  // d_model x n_classes
    Eigen::MatrixXd head_b;  // 1 x n_classes

    static TransformerParams zeros(const TransformerConfig& config);
};

enum class TensorKind { weight, bias, ln_gain, ln_shift, token_embedding, pos_embedding };

struct TensorRef {
    std::string name;
    Eigen::MatrixXd* tensor;
    TensorKind kind;
};
struct ConstTensorRef {
    std::string name;
    const Eigen::MatrixXd* tensor;
    TensorKind kind;
};

// Fixed traversal order shared by initialization, AdamW, serialization and
// the gradient checks.
std::vector<TensorRef> tensor_refs(TransformerParams& params);
std::vector<ConstTensorRef> tensor_refs(const TransformerParams& params);

// Uniform(-1/sqrt(d_model), +1/sqrt(d_model)) for weights and embeddings
// (PAD row zeroed), layer-norm gain 1 / shift 0, biases 0; draws come from
// stream (seed, "transformer.init").
TransformerParams init_params(const TransformerConfig& config, std::uint64_t seed);

struct EncodedBatch {
    std::vector<std::vector<int>> ids;   // batch x max_len
    std::vector<std::vector<int>> mask;  // 1 = real token, 0 = padding
};

// [CLS] + word ids, truncated to max_len, right-padded with PAD.
EncodedBatch encode_batch(const std::vector<std::string>& texts, const EncoderTokenizer& tok,
                          int max_len);

struct LayerNormCache {
    Eigen::MatrixXd normalized;  // x-hat before gain/shift
    Eigen::VectorXd inv_std;     // per row
};

struct LayerCache {
    Eigen::MatrixXd input;
    Eigen::MatrixXd q, k, v;
    std::vector<Eigen::MatrixXd> attn;  // per head: L x L attention probabilities
    Eigen::MatrixXd context;
    Eigen::MatrixXd attn_out;
    Eigen::MatrixXd drop_attn;  // inverted-dropout masks; empty when disabled
    Eigen::MatrixXd res1;
    LayerNormCache ln1;
    Eigen::MatrixXd n1;
    Eigen::MatrixXd ffn_pre;
    Eigen::MatrixXd ffn_act;
    Eigen::MatrixXd ffn_out;
    Eigen::MatrixXd drop_ffn;
    Eigen::MatrixXd res2;
    LayerNormCache ln2;
    Eigen::MatrixXd output;
};

struct ExampleCache {
    Eigen::MatrixXd embedded;
    std::vector<LayerCache> layers;
    Eigen::VectorXd cls;
    Eigen::Vector2d logits;
};

class Rng;

struct Dropout {
    double rate = 0.0;
    Rng* rng = nullptr;
};

// Forward pass for one sequence, keeping every intermediate needed by the
// backward pass. Throws ComputeError naming the layer if an activation goes
// non-finite.
void forward_cached(const TransformerParams& params, const std::vector<int>& ids,
                    const std::vector<int>& mask, ExampleCache& cache,
                    const Dropout* dropout = nullptr);

// Batch logits (batch x n_classes).
Eigen::MatrixXd forward(const TransformerParams& params, const EncodedBatch& batch);

struct LossAndGrads {
    double loss = 0.0;
    TransformerParams grads;
};

// Mean cross-entropy over the batch with exact gradients for every tensor.
LossAndGrads loss_and_grads(const TransformerParams& params, const EncodedBatch& batch,
                            const std::vector<int>& labels, const Dropout* dropout = nullptr);

struct TrainConfig {
    int batch_size = 16;
    int epochs = 15;
    double learning_rate = 5e-4;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    double weight_decay = 0.01;
    double dropout = 0.0;  // applied only when > 0
    std::uint64_t seed = 0;
};

struct AdamWState {
    TransformerParams m, v;
    std::int64_t step = 0;

    static AdamWState zeros(const TransformerConfig& config);
};

// Decoupled weight decay with bias-corrected moments:
//   param <- param - lr * m_hat / (sqrt(v_hat) + eps) - lr * wd * param
// Decay skips biases, layer-norm gains/shifts and the PAD embedding row.
void adamw_step(TransformerParams& params, const TransformerParams& grads, AdamWState& state,
                const TrainConfig& config);

struct EpochStats {
    double train_loss = 0.0;
    double train_acc = 0.0;
    double val_loss = 0.0;
    double val_acc = 0.0;
};

using TrainLog = std::vector<EpochStats>;

struct TrainedTransformer {
    TransformerConfig config;
    TransformerParams params;
    EncoderTokenizer tokenizer;
    TrainLog log;
};

// Builds the tokenizer from the training texts, initializes from
// (seed, "transformer.init"), shuffles with (seed, "transformer.shuffle")
// and appends train/validation loss and accuracy after every epoch.
// Divergence aborts with the epoch number.
TrainedTransformer train_transformer(const Corpus& train, const Corpus& val,
                                     TransformerConfig config, const TrainConfig& train_config);

struct EvalStats {
    double loss = 0.0;
    double accuracy = 0.0;
};
EvalStats evaluate_transformer(const TransformerParams& params, const EncoderTokenizer& tok,
                               const Corpus& corpus, int batch_size);

// softmax(logits) for a single sentence: {P(class 0), P(class 1)}.
std::array<double, 2> predict_proba(const TransformerParams& params, const std::string& text,
                                    const EncoderTokenizer& tok);

// Weight file: config block, tokenizer word list, and per-tensor flat arrays
// in row-major order with explicit shapes.
nlohmann::json transformer_to_json(const TrainedTransformer& model);
TrainedTransformer transformer_from_json(const nlohmann::json& j);
void save_transformer(const TrainedTransformer& model, const std::string& path);
TrainedTransformer load_transformer(const std::string& path);

std::string train_log_to_csv(const TrainLog& log);

}  // namespace senti
