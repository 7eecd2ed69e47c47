#include "senti/transformer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "senti/error.hpp"
#include "senti/model_io.hpp"
#include "senti/preprocess.hpp"
#include "senti/rng.hpp"

namespace senti {

namespace {

constexpr double kLayerNormEps = 1e-12;
constexpr double kMaskValue = -1e30;
constexpr double kInvSqrt2Pi = 0.3989422804014327;

double gelu_scalar(double x) {
    return 0.5 * x * (1.0 + std::erf(x * M_SQRT1_2));
}

double gelu_prime_scalar(double x) {
    return 0.5 * (1.0 + std::erf(x * M_SQRT1_2)) + x * std::exp(-0.5 * x * x) * kInvSqrt2Pi;
}

void layer_norm_forward(const Eigen::MatrixXd& x, const Eigen::MatrixXd& gain,
                        const Eigen::MatrixXd& shift, LayerNormCache& cache,
                        Eigen::MatrixXd& out) {
    const Eigen::Index rows = x.rows(), cols = x.cols();
    cache.normalized.resize(rows, cols);
    cache.inv_std.resize(rows);
    out.resize(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        double mean = x.row(i).mean();
        Eigen::RowVectorXd centered = x.row(i).array() - mean;
        double var = centered.squaredNorm() / static_cast<double>(cols);
        double inv = 1.0 / std::sqrt(var + kLayerNormEps);
        cache.inv_std(i) = inv;
        cache.normalized.row(i) = centered * inv;
        out.row(i) =
            cache.normalized.row(i).cwiseProduct(gain.row(0)) + shift.row(0);
    }
}

// Returns dX and accumulates the gain/shift gradients.
Eigen::MatrixXd layer_norm_backward(const Eigen::MatrixXd& d_out, const Eigen::MatrixXd& gain,
                                    const LayerNormCache& cache, Eigen::MatrixXd& g_gain,
                                    Eigen::MatrixXd& g_shift) {
    const Eigen::Index rows = d_out.rows(), cols = d_out.cols();
    Eigen::MatrixXd dx(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        Eigen::RowVectorXd d_hat = d_out.row(i).cwiseProduct(gain.row(0));
        double m1 = d_hat.mean();
        double m2 = d_hat.cwiseProduct(cache.normalized.row(i)).mean();
        dx.row(i) = cache.inv_std(i) *
                    (d_hat.array() - m1 - cache.normalized.row(i).array() * m2).matrix();
        g_gain.row(0) += d_out.row(i).cwiseProduct(cache.normalized.row(i));
        g_shift.row(0) += d_out.row(i);
    }
    return dx;
}

Eigen::MatrixXd dropout_mask(Eigen::Index rows, Eigen::Index cols, const Dropout& dropout);

std::vector<std::string> texts_of(const Corpus& corpus) {
    std::vector<std::string> texts;
    texts.reserve(corpus.size());
    for (const auto& e : corpus.examples) texts.push_back(e.text);
    return texts;
}

std::vector<int> labels_of(const Corpus& corpus) {
    std::vector<int> labels;
    labels.reserve(corpus.size());
    for (const auto& e : corpus.examples) labels.push_back(e.label);
    return labels;
}

}  // namespace

EncoderTokenizer EncoderTokenizer::build(const std::vector<std::string>& texts) {
    std::vector<std::string> words;
    {
        std::unordered_map<std::string, bool> seen;
        for (const auto& text : texts) {
            for (auto& token : tokenize(text, 1)) {
                if (seen.emplace(token, true).second) words.push_back(std::move(token));
            }
        }
    }
    std::sort(words.begin(), words.end());
    return from_words(std::move(words));
}

EncoderTokenizer EncoderTokenizer::from_words(std::vector<std::string> words) {
    EncoderTokenizer tok;
    tok.words_ = std::move(words);
    tok.ids_.reserve(tok.words_.size());
    for (std::size_t i = 0; i < tok.words_.size(); ++i) {
        if (!tok.ids_.emplace(tok.words_[i], static_cast<int>(i) + 3).second) {
            throw InputError("tokenizer word list contains duplicates");
        }
    }
    return tok;
}

int EncoderTokenizer::id_of(const std::string& word) const {
    auto it = ids_.find(word);
    return it == ids_.end() ? kUnk : it->second;
}

EncodedBatch encode_batch(const std::vector<std::string>& texts, const EncoderTokenizer& tok,
                          int max_len) {
    if (max_len < 2) throw InputError("encode_batch: max_len must be >= 2");
    EncodedBatch batch;
    batch.ids.reserve(texts.size());
    batch.mask.reserve(texts.size());
    for (const auto& text : texts) {
        std::vector<int> ids{EncoderTokenizer::kCls};
        for (const auto& word : tokenize(text, 1)) {
            if (static_cast<int>(ids.size()) >= max_len) break;
            ids.push_back(tok.id_of(word));
        }
        ids.resize(static_cast<std::size_t>(max_len), EncoderTokenizer::kPad);
        std::vector<int> mask(static_cast<std::size_t>(max_len), 0);
        for (std::size_t p = 0; p < mask.size(); ++p) {
            mask[p] = ids[p] == EncoderTokenizer::kPad ? 0 : 1;
        }
        // A genuine PAD id can only come from padding: kPad is never produced
        // by id_of, so the mask above is exact.
        batch.ids.push_back(std::move(ids));
        batch.mask.push_back(std::move(mask));
    }
    return batch;
}

TransformerParams TransformerParams::zeros(const TransformerConfig& config) {
    TransformerParams p;
    p.config = config;
    p.token_embedding = Eigen::MatrixXd::Zero(config.vocab_size, config.d_model);
    p.pos_embedding = Eigen::MatrixXd::Zero(config.max_seq_len, config.d_model);
    p.layers.resize(static_cast<std::size_t>(config.n_layers));
    for (auto& l : p.layers) {
        l.wq = Eigen::MatrixXd::Zero(config.d_model, config.d_model);
        l.wk = Eigen::MatrixXd::Zero(config.d_model, config.d_model);
        l.wv = Eigen::MatrixXd::Zero(config.d_model, config.d_model);
        l.wo = Eigen::MatrixXd::Zero(config.d_model, config.d_model);
        l.ffn_w1 = Eigen::MatrixXd::Zero(config.d_model, config.d_ff);
        l.ffn_b1 = Eigen::MatrixXd::Zero(1, config.d_ff);
        l.ffn_w2 = Eigen::MatrixXd::Zero(config.d_ff, config.d_model);
        l.ffn_b2 = Eigen::MatrixXd::Zero(1, config.d_model);
        l.ln1_gain = Eigen::MatrixXd::Zero(1, config.d_model);
        l.ln1_bias = Eigen::MatrixXd::Zero(1, config.d_model);
        l.ln2_gain = Eigen::MatrixXd::Zero(1, config.d_model);
        l.ln2_bias = Eigen::MatrixXd::Zero(1, config.d_model);
    }
    p.head_w = Eigen::MatrixXd::Zero(config.d_model, config.n_classes);
    p.head_b = Eigen::MatrixXd::Zero(1, config.n_classes);
    return p;
}

std::vector<TensorRef> tensor_refs(TransformerParams& params) {
    std::vector<TensorRef> refs;
    refs.push_back({"token_embedding", &params.token_embedding, TensorKind::token_embedding});
    refs.push_back({"pos_embedding", &params.pos_embedding, TensorKind::pos_embedding});
    for (std::size_t i = 0; i < params.layers.size(); ++i) {
        std::string prefix = "layer" + std::to_string(i) + ".";
        LayerParams& l = params.layers[i];
        refs.push_back({prefix + "wq", &l.wq, TensorKind::weight});
        refs.push_back({prefix + "wk", &l.wk, TensorKind::weight});
        refs.push_back({prefix + "wv", &l.wv, TensorKind::weight});
        refs.push_back({prefix + "wo", &l.wo, TensorKind::weight});
        refs.push_back({prefix + "ffn_w1", &l.ffn_w1, TensorKind::weight});
        refs.push_back({prefix + "ffn_b1", &l.ffn_b1, TensorKind::bias});
        refs.push_back({prefix + "ffn_w2", &l.ffn_w2, TensorKind::weight});
        refs.push_back({prefix + "ffn_b2", &l.ffn_b2, TensorKind::bias});
        refs.push_back({prefix + "ln1_gain", &l.ln1_gain, TensorKind::ln_gain});
        refs.push_back({prefix + "ln1_bias", &l.ln1_bias, TensorKind::ln_shift});
        refs.push_back({prefix + "ln2_gain", &l.ln2_gain, TensorKind::ln_gain});
        refs.push_back({prefix + "ln2_bias", &l.ln2_bias, TensorKind::ln_shift});
    }
    refs.push_back({"head_w", &params.head_w, TensorKind::weight});
    refs.push_back({"head_b", &params.head_b, TensorKind::bias});
    return refs;
}

std::vector<ConstTensorRef> tensor_refs(const TransformerParams& params) {
    auto refs = tensor_refs(const_cast<TransformerParams&>(params));
    std::vector<ConstTensorRef> out;
    out.reserve(refs.size());
    for (const auto& r : refs) out.push_back({r.name, r.tensor, r.kind});
    return out;
}

TransformerParams init_params(const TransformerConfig& config, std::uint64_t seed) {
    if (config.vocab_size < 3) throw InputError("transformer: vocab_size must be >= 3");
    if (config.d_model < 1 || config.n_heads < 1 || config.d_model % config.n_heads != 0) {
        throw InputError("transformer: d_model must be divisible by n_heads");
    }
    if (config.max_seq_len < 2) throw InputError("transformer: max_seq_len must be >= 2");
    if (config.n_classes != 2) throw InputError("transformer: n_classes must be 2");

    TransformerParams params = TransformerParams::zeros(config);
    Rng rng = Rng::stream(seed, "transformer.init");
    double scale = 1.0 / std::sqrt(static_cast<double>(config.d_model));
    for (auto& ref : tensor_refs(params)) {
        switch (ref.kind) {
            case TensorKind::weight:
            case TensorKind::token_embedding:
            case TensorKind::pos_embedding:
                for (Eigen::Index r = 0; r < ref.tensor->rows(); ++r) {
                    for (Eigen::Index c = 0; c < ref.tensor->cols(); ++c) {
                        (*ref.tensor)(r, c) = rng.uniform(-scale, scale);
                    }
                }
                break;
            case TensorKind::ln_gain:
                ref.tensor->setOnes();
                break;
            case TensorKind::bias:
            case TensorKind::ln_shift:
                ref.tensor->setZero();
                break;
        }
    }
    // Padding embeds to zero and, with decay skipping it, stays zero.
    params.token_embedding.row(EncoderTokenizer::kPad).setZero();
    return params;
}

namespace {

Eigen::MatrixXd dropout_mask(Eigen::Index rows, Eigen::Index cols, const Dropout& dropout) {
    Eigen::MatrixXd mask(rows, cols);
    double keep_scale = 1.0 / (1.0 - dropout.rate);
    for (Eigen::Index r = 0; r < rows; ++r) {
        for (Eigen::Index c = 0; c < cols; ++c) {
            mask(r, c) = dropout.rng->unit() >= dropout.rate ? keep_scale : 0.0;
        }
    }
    return mask;
}

}  // namespace

void forward_cached(const TransformerParams& params, const std::vector<int>& ids,
                    const std::vector<int>& mask, ExampleCache& cache, const Dropout* dropout) {
    const TransformerConfig& cfg = params.config;
    const auto len = static_cast<Eigen::Index>(ids.size());
    if (ids.size() != mask.size()) throw InputError("transformer: ids/mask length mismatch");
    if (len < 1 || len > cfg.max_seq_len) {
        throw InputError("transformer: sequence length exceeds max_seq_len");
    }
    const int d_model = cfg.d_model;
    const int n_heads = cfg.n_heads;
    const int d_k = d_model / n_heads;
    const double scale = 1.0 / std::sqrt(static_cast<double>(d_k));
    const bool use_dropout = dropout != nullptr && dropout->rate > 0.0;

    cache.embedded.resize(len, d_model);
    for (Eigen::Index p = 0; p < len; ++p) {
        int id = ids[static_cast<std::size_t>(p)];
        if (id < 0 || id >= cfg.vocab_size) throw InputError("transformer: token id out of range");
        cache.embedded.row(p) = params.token_embedding.row(id) + params.pos_embedding.row(p);
    }

    cache.layers.resize(params.layers.size());
    Eigen::MatrixXd x = cache.embedded;
    for (std::size_t li = 0; li < params.layers.size(); ++li) {
        const LayerParams& lp = params.layers[li];
        LayerCache& c = cache.layers[li];
        c.input = x;
        c.q = x * lp.wq;
        c.k = x * lp.wk;
        c.v = x * lp.wv;
        c.attn.assign(static_cast<std::size_t>(n_heads), Eigen::MatrixXd());
        c.context.resize(len, d_model);
        for (int h = 0; h < n_heads; ++h) {
            auto qh = c.q.middleCols(h * d_k, d_k);
            auto kh = c.k.middleCols(h * d_k, d_k);
            auto vh = c.v.middleCols(h * d_k, d_k);
            Eigen::MatrixXd scores = qh * kh.transpose() * scale;
            for (Eigen::Index j = 0; j < len; ++j) {
                if (mask[static_cast<std::size_t>(j)] == 0) {
                    scores.col(j).setConstant(kMaskValue);
                }
            }
            Eigen::MatrixXd& attn = c.attn[static_cast<std::size_t>(h)];
            attn.resize(len, len);
            for (Eigen::Index i = 0; i < len; ++i) {
                double row_max = scores.row(i).maxCoeff();
                attn.row(i) = (scores.row(i).array() - row_max).exp();
                attn.row(i) /= attn.row(i).sum();
            }
            c.context.middleCols(h * d_k, d_k) = attn * vh;
        }
        c.attn_out = c.context * lp.wo;
        Eigen::MatrixXd attn_res = c.attn_out;
        if (use_dropout) {
            c.drop_attn = dropout_mask(len, d_model, *dropout);
            attn_res = attn_res.cwiseProduct(c.drop_attn);
        }
        c.res1 = c.input + attn_res;
        layer_norm_forward(c.res1, lp.ln1_gain, lp.ln1_bias, c.ln1, c.n1);

        c.ffn_pre = (c.n1 * lp.ffn_w1).rowwise() + lp.ffn_b1.row(0);
        c.ffn_act = c.ffn_pre.unaryExpr(&gelu_scalar);
        c.ffn_out = (c.ffn_act * lp.ffn_w2).rowwise() + lp.ffn_b2.row(0);
        Eigen::MatrixXd ffn_res = c.ffn_out;
        if (use_dropout) {
            c.drop_ffn = dropout_mask(len, d_model, *dropout);
            ffn_res = ffn_res.cwiseProduct(c.drop_ffn);
        }
        c.res2 = c.n1 + ffn_res;
        layer_norm_forward(c.res2, lp.ln2_gain, lp.ln2_bias, c.ln2, c.output);

        if (!c.output.allFinite()) {
            throw ComputeError("transformer: non-finite activation in layer " + std::to_string(li));
        }
        x = c.output;
    }

    cache.cls = x.row(0).transpose();
    Eigen::RowVectorXd logits = x.row(0) * params.head_w + params.head_b.row(0);
    cache.logits = logits.transpose();
    if (!cache.logits.allFinite()) throw ComputeError("transformer: non-finite logits");
}

Eigen::MatrixXd forward(const TransformerParams& params, const EncodedBatch& batch) {
    Eigen::MatrixXd logits(static_cast<Eigen::Index>(batch.ids.size()), params.config.n_classes);
    ExampleCache cache;
    for (std::size_t b = 0; b < batch.ids.size(); ++b) {
        forward_cached(params, batch.ids[b], batch.mask[b], cache);
        logits.row(static_cast<Eigen::Index>(b)) = cache.logits.transpose();
    }
    return logits;
}

namespace {

// Accumulates this example's parameter gradients given d loss / d logits.
void backward_example(const TransformerParams& params, const ExampleCache& cache,
                      const std::vector<int>& ids, const Eigen::Vector2d& d_logits,
                      TransformerParams& grads) {
    const TransformerConfig& cfg = params.config;
    const int n_heads = cfg.n_heads;
    const int d_k = cfg.d_model / n_heads;
    const double scale = 1.0 / std::sqrt(static_cast<double>(d_k));
    const Eigen::Index len = cache.embedded.rows();

    grads.head_w += cache.cls * d_logits.transpose();
    grads.head_b.row(0) += d_logits.transpose();

    Eigen::MatrixXd dx = Eigen::MatrixXd::Zero(len, cfg.d_model);
    dx.row(0) = d_logits.transpose() * params.head_w.transpose();

    for (std::size_t li = params.layers.size(); li-- > 0;) {
        const LayerParams& lp = params.layers[li];
        const LayerCache& c = cache.layers[li];
        LayerParams& gl = grads.layers[li];

        Eigen::MatrixXd d_res2 =
            layer_norm_backward(dx, lp.ln2_gain, c.ln2, gl.ln2_gain, gl.ln2_bias);

        Eigen::MatrixXd d_n1 = d_res2;
        Eigen::MatrixXd d_ffn_out = d_res2;
        if (c.drop_ffn.size() > 0) d_ffn_out = d_ffn_out.cwiseProduct(c.drop_ffn);

        gl.ffn_w2 += c.ffn_act.transpose() * d_ffn_out;
        gl.ffn_b2.row(0) += d_ffn_out.colwise().sum();
        Eigen::MatrixXd d_act = d_ffn_out * lp.ffn_w2.transpose();
        Eigen::MatrixXd d_pre = d_act.cwiseProduct(c.ffn_pre.unaryExpr(&gelu_prime_scalar));
        gl.ffn_w1 += c.n1.transpose() * d_pre;
        gl.ffn_b1.row(0) += d_pre.colwise().sum();
        d_n1 += d_pre * lp.ffn_w1.transpose();

        Eigen::MatrixXd d_res1 =
            layer_norm_backward(d_n1, lp.ln1_gain, c.ln1, gl.ln1_gain, gl.ln1_bias);

        dx = d_res1;  // residual path to the layer input
        Eigen::MatrixXd d_attn_out = d_res1;
        if (c.drop_attn.size() > 0) d_attn_out = d_attn_out.cwiseProduct(c.drop_attn);

        gl.wo += c.context.transpose() * d_attn_out;
        Eigen::MatrixXd d_context = d_attn_out * lp.wo.transpose();

        Eigen::MatrixXd dq(len, cfg.d_model), dk(len, cfg.d_model), dv(len, cfg.d_model);
        for (int h = 0; h < n_heads; ++h) {
            auto qh = c.q.middleCols(h * d_k, d_k);
            auto kh = c.k.middleCols(h * d_k, d_k);
            auto vh = c.v.middleCols(h * d_k, d_k);
            const Eigen::MatrixXd& attn = c.attn[static_cast<std::size_t>(h)];
            Eigen::MatrixXd d_ch = d_context.middleCols(h * d_k, d_k);

            Eigen::MatrixXd d_attn = d_ch * vh.transpose();
            dv.middleCols(h * d_k, d_k) = attn.transpose() * d_ch;

            // softmax backward row by row: ds = a .* (da - sum(da .* a))
            Eigen::VectorXd row_dots = (d_attn.cwiseProduct(attn)).rowwise().sum();
            Eigen::MatrixXd d_scores =
                attn.cwiseProduct(d_attn - row_dots.replicate(1, len)) * scale;

            dq.middleCols(h * d_k, d_k) = d_scores * kh;
            dk.middleCols(h * d_k, d_k) = d_scores.transpose() * qh;
        }
        gl.wq += c.input.transpose() * dq;
        gl.wk += c.input.transpose() * dk;
        gl.wv += c.input.transpose() * dv;
        dx += dq * lp.wq.transpose() + dk * lp.wk.transpose() + dv * lp.wv.transpose();
    }

    for (Eigen::Index p = 0; p < len; ++p) {
        grads.token_embedding.row(ids[static_cast<std::size_t>(p)]) += dx.row(p);
        grads.pos_embedding.row(p) += dx.row(p);
    }
}

}  // namespace

LossAndGrads loss_and_grads(const TransformerParams& params, const EncodedBatch& batch,
                            const std::vector<int>& labels, const Dropout* dropout) {
    if (batch.ids.size() != labels.size()) {
        throw InputError("loss_and_grads: batch/labels size mismatch");
    }
    if (batch.ids.empty()) throw InputError("loss_and_grads: empty batch");

    LossAndGrads result;
    result.grads = TransformerParams::zeros(params.config);
    const double inv_batch = 1.0 / static_cast<double>(batch.ids.size());

    ExampleCache cache;
    for (std::size_t b = 0; b < batch.ids.size(); ++b) {
        int y = labels[b];
        if (y != 0 && y != 1) throw InputError("loss_and_grads: labels must be 0 or 1");
        forward_cached(params, batch.ids[b], batch.mask[b], cache, dropout);

        double max_logit = cache.logits.maxCoeff();
        double lse = max_logit + std::log(std::exp(cache.logits(0) - max_logit) +
                                          std::exp(cache.logits(1) - max_logit));
        result.loss += (lse - cache.logits(y)) * inv_batch;

        Eigen::Vector2d d_logits;
        d_logits(0) = std::exp(cache.logits(0) - lse);
        d_logits(1) = std::exp(cache.logits(1) - lse);
        d_logits(y) -= 1.0;
        d_logits *= inv_batch;

        backward_example(params, cache, batch.ids[b], d_logits, result.grads);
    }
    return result;
}

// --- training loop -------------------------------------------------------

AdamWState AdamWState::zeros(const TransformerConfig& config) {
    AdamWState state;
    state.m = TransformerParams::zeros(config);
    state.v = TransformerParams::zeros(config);
    state.step = 0;
    return state;
}

void adamw_step(TransformerParams& params, const TransformerParams& grads, AdamWState& state,
                const TrainConfig& config) {
    state.step += 1;
    const double bc1 = 1.0 - std::pow(config.beta1, static_cast<double>(state.step));
    const double bc2 = 1.0 - std::pow(config.beta2, static_cast<double>(state.step));

    auto p_refs = tensor_refs(params);
    auto g_refs = tensor_refs(const_cast<TransformerParams&>(grads));
    auto m_refs = tensor_refs(state.m);
    auto v_refs = tensor_refs(state.v);
    for (std::size_t i = 0; i < p_refs.size(); ++i) {
        Eigen::MatrixXd& p = *p_refs[i].tensor;
        const Eigen::MatrixXd& g = *g_refs[i].tensor;
        Eigen::MatrixXd& m = *m_refs[i].tensor;
        Eigen::MatrixXd& v = *v_refs[i].tensor;

        m = config.beta1 * m + (1.0 - config.beta1) * g;
        v = config.beta2 * v + (1.0 - config.beta2) * g.cwiseProduct(g);

        Eigen::MatrixXd update =
            config.learning_rate *
            (m / bc1).cwiseQuotient(((v / bc2).cwiseSqrt().array() + config.epsilon).matrix());

        switch (p_refs[i].kind) {
            case TensorKind::weight:
            case TensorKind::pos_embedding:
                update += (config.learning_rate * config.weight_decay) * p;
                break;
            case TensorKind::token_embedding: {
                Eigen::MatrixXd decay = (config.learning_rate * config.weight_decay) * p;
                decay.row(EncoderTokenizer::kPad).setZero();
                update += decay;
                break;
            }
            case TensorKind::bias:
            case TensorKind::ln_gain:
            case TensorKind::ln_shift:
                break;
        }
        p -= update;
    }
}

EvalStats evaluate_transformer(const TransformerParams& params, const EncoderTokenizer& tok,
                               const Corpus& corpus, int batch_size) {
    if (corpus.empty()) throw InputError("evaluate_transformer: empty corpus");
    const auto texts = texts_of(corpus);
    const auto labels = labels_of(corpus);

    EvalStats stats;
    std::size_t correct = 0;
    double total_loss = 0.0;
    for (std::size_t start = 0; start < texts.size(); start += static_cast<std::size_t>(batch_size)) {
        std::size_t end = std::min(texts.size(), start + static_cast<std::size_t>(batch_size));
        std::vector<std::string> chunk(texts.begin() + start, texts.begin() + end);
        int longest = 0;
        for (const auto& t : chunk) longest = std::max(longest, static_cast<int>(tokenize(t, 1).size()));
        int max_len = std::clamp(longest + 1, 2, params.config.max_seq_len);
        EncodedBatch batch = encode_batch(chunk, tok, max_len);
        Eigen::MatrixXd logits = forward(params, batch);
        for (std::size_t b = 0; b < chunk.size(); ++b) {
            auto row = logits.row(static_cast<Eigen::Index>(b));
            int y = labels[start + b];
            double max_logit = row.maxCoeff();
            double lse = max_logit + std::log(std::exp(row(0) - max_logit) + std::exp(row(1) - max_logit));
            total_loss += lse - row(y);
            int pred = row(1) > row(0) ? 1 : 0;
            correct += pred == y;
        }
    }
    stats.loss = total_loss / static_cast<double>(texts.size());
    stats.accuracy = static_cast<double>(correct) / static_cast<double>(texts.size());
    return stats;
}

TrainedTransformer train_transformer(const Corpus& train, const Corpus& val,
                                     TransformerConfig config, const TrainConfig& train_config) {
    if (train.empty() || val.empty()) {
        throw InputError("train_transformer: train and validation corpora must be non-empty");
    }
    if (train_config.batch_size < 1) throw InputError("train_transformer: batch_size must be >= 1");
    if (train_config.epochs < 1) throw InputError("train_transformer: epochs must be >= 1");

    const auto texts = texts_of(train);
    const auto labels = labels_of(train);

    TrainedTransformer model;
    model.tokenizer = EncoderTokenizer::build(texts);
    config.vocab_size = model.tokenizer.vocab_size();
    model.config = config;
    model.params = init_params(config, train_config.seed);

    AdamWState adam = AdamWState::zeros(config);
    Rng shuffle_rng = Rng::stream(train_config.seed, "transformer.shuffle");
    Rng dropout_rng = Rng::stream(train_config.seed, "transformer.dropout");
    Dropout dropout{train_config.dropout, &dropout_rng};

    std::vector<std::size_t> order(texts.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

    for (int epoch = 0; epoch < train_config.epochs; ++epoch) {
        shuffle_rng.shuffle(order);
        for (std::size_t start = 0; start < order.size();
             start += static_cast<std::size_t>(train_config.batch_size)) {
            std::size_t end =
                std::min(order.size(), start + static_cast<std::size_t>(train_config.batch_size));
            std::vector<std::string> batch_texts;
            std::vector<int> batch_labels;
            int longest = 0;
            for (std::size_t i = start; i < end; ++i) {
                batch_texts.push_back(texts[order[i]]);
                batch_labels.push_back(labels[order[i]]);
                longest = std::max(longest,
                                   static_cast<int>(tokenize(batch_texts.back(), 1).size()));
            }
            int max_len = std::clamp(longest + 1, 2, config.max_seq_len);
            EncodedBatch batch = encode_batch(batch_texts, model.tokenizer, max_len);

            LossAndGrads lg;
            try {
                lg = loss_and_grads(model.params, batch, batch_labels,
                                    train_config.dropout > 0.0 ? &dropout : nullptr);
            } catch (const ComputeError& e) {
                throw ComputeError(std::string(e.what()) + " (epoch " + std::to_string(epoch + 1) + ")");
            }
            if (!std::isfinite(lg.loss)) {
                throw ComputeError("transformer: training diverged at epoch " +
                                   std::to_string(epoch + 1));
            }
            adamw_step(model.params, lg.grads, adam, train_config);
        }

        EpochStats stats;
        EvalStats train_stats =
            evaluate_transformer(model.params, model.tokenizer, train, train_config.batch_size);
        EvalStats val_stats =
            evaluate_transformer(model.params, model.tokenizer, val, train_config.batch_size);
        stats.train_loss = train_stats.loss;
        stats.train_acc = train_stats.accuracy;
        stats.val_loss = val_stats.loss;
        stats.val_acc = val_stats.accuracy;
        model.log.push_back(stats);
    }
    return model;
}

std::array<double, 2> predict_proba(const TransformerParams& params, const std::string& text,
                                    const EncoderTokenizer& tok) {
    int words = static_cast<int>(tokenize(text, 1).size());
    int max_len = std::clamp(words + 1, 2, params.config.max_seq_len);
    EncodedBatch batch = encode_batch({text}, tok, max_len);
    Eigen::MatrixXd logits = forward(params, batch);
    double max_logit = logits.row(0).maxCoeff();
    double e0 = std::exp(logits(0, 0) - max_logit);
    double e1 = std::exp(logits(0, 1) - max_logit);
    return {e0 / (e0 + e1), e1 / (e0 + e1)};
}

// --- serialization -------------------------------------------------------

nlohmann::json transformer_to_json(const TrainedTransformer& model) {
    nlohmann::json j;
    j["model_type"] = "transformer";
    j["version"] = 1;
    j["config"] = {{"vocab_size", model.config.vocab_size},
                   {"d_model", model.config.d_model},
                   {"n_heads", model.config.n_heads},
                   {"n_layers", model.config.n_layers},
                   {"d_ff", model.config.d_ff},
                   {"max_seq_len", model.config.max_seq_len},
                   {"n_classes", model.config.n_classes}};
    j["tokenizer"] = model.tokenizer.words();
    auto& tensors = j["tensors"] = nlohmann::json::object();
    for (const auto& ref : tensor_refs(model.params)) {
        std::vector<double> flat;
        flat.reserve(static_cast<std::size_t>(ref.tensor->size()));
        for (Eigen::Index r = 0; r < ref.tensor->rows(); ++r) {
            for (Eigen::Index c = 0; c < ref.tensor->cols(); ++c) {
                flat.push_back((*ref.tensor)(r, c));
            }
        }
        tensors[ref.name] = {{"shape", {ref.tensor->rows(), ref.tensor->cols()}},
                             {"data", std::move(flat)}};
    }
    return j;
}

TrainedTransformer transformer_from_json(const nlohmann::json& j) {
    try {
        if (j.at("model_type").get<std::string>() != "transformer") {
            throw InputError("not a transformer weight file");
        }
        if (j.at("version").get<int>() != 1) throw InputError("unsupported transformer version");
        const auto& jc = j.at("config");
        TransformerConfig config;
        config.vocab_size = jc.at("vocab_size").get<int>();
        config.d_model = jc.at("d_model").get<int>();
        config.n_heads = jc.at("n_heads").get<int>();
        config.n_layers = jc.at("n_layers").get<int>();
        config.d_ff = jc.at("d_ff").get<int>();
        config.max_seq_len = jc.at("max_seq_len").get<int>();
        config.n_classes = jc.at("n_classes").get<int>();

        TrainedTransformer model;
        model.config = config;
        model.tokenizer =
            EncoderTokenizer::from_words(j.at("tokenizer").get<std::vector<std::string>>());
        if (model.tokenizer.vocab_size() != config.vocab_size) {
            throw InputError("transformer: tokenizer size does not match config.vocab_size");
        }
        model.params = TransformerParams::zeros(config);
        const auto& tensors = j.at("tensors");
        for (auto& ref : tensor_refs(model.params)) {
            const auto& t = tensors.at(ref.name);
            auto shape = t.at("shape").get<std::vector<Eigen::Index>>();
            if (shape.size() != 2 || shape[0] != ref.tensor->rows() || shape[1] != ref.tensor->cols()) {
                throw InputError("transformer: tensor '" + ref.name + "' has unexpected shape");
            }
            auto data = t.at("data").get<std::vector<double>>();
            if (static_cast<Eigen::Index>(data.size()) != ref.tensor->size()) {
                throw InputError("transformer: tensor '" + ref.name + "' has wrong element count");
            }
            std::size_t pos = 0;
            for (Eigen::Index r = 0; r < ref.tensor->rows(); ++r) {
                for (Eigen::Index c = 0; c < ref.tensor->cols(); ++c) {
                    (*ref.tensor)(r, c) = data[pos++];
                }
            }
        }
        return model;
    } catch (const nlohmann::json::exception& e) {
        throw InputError(std::string("malformed transformer weight file: ") + e.what());
    }
}

void save_transformer(const TrainedTransformer& model, const std::string& path) {
    write_text_file(path, transformer_to_json(model).dump(2) + "\n");
}

TrainedTransformer load_transformer(const std::string& path) {
    return transformer_from_json(read_json_file(path));
}

std::string train_log_to_csv(const TrainLog& log) {
    std::string csv = "epoch,train_loss,train_acc,val_loss,val_acc\n";
    char line[256];
    for (std::size_t i = 0; i < log.size(); ++i) {
        std::snprintf(line, sizeof(line), "%zu,%.17g,%.17g,%.17g,%.17g\n", i + 1,
                      log[i].train_loss, log[i].train_acc, log[i].val_loss, log[i].val_acc);
        csv += line;
    }
    return csv;
}

}  // namespace senti
