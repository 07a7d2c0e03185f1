#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "topseg/augment.hpp"
#include "topseg/corpus.hpp"
#include "topseg/losses.hpp"
#include "topseg/metrics.hpp"
#include "topseg/pairs.hpp"

namespace topseg {

struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    Vec data;  // row-major

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

    double& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
    double at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
};

using SentenceRep = Vec;  // the D-dimensional representation h_i

/// Encoder and head parameters. Doubles as the gradient container: gradients
/// have exactly the shapes of the parameters they correspond to.
struct ModelParams {
    Matrix embed;   // F x D; row per hash bucket
    Matrix ctx;     // D x D, mixes the neighbor-context mean
    Vec bias;       // D
    Matrix seg_w;   // 2 x D boundary head
    Vec seg_b;      // 2
    Matrix tssp_w;  // 3 x 2D pair head on [h_i; h_{i+1}]
    Vec tssp_b;     // 3

    std::size_t feature_dim() const { return embed.rows; }
    std::size_t rep_dim() const { return embed.cols; }
};

ModelParams zeros_like(const ModelParams& p);
void axpy_params(ModelParams& acc, const ModelParams& g, double scale);  // acc += scale * g
void scale_params(ModelParams& p, double scale);
Vec flatten_params(const ModelParams& p);
void unflatten_params(const Vec& flat, ModelParams& p);

struct TrainConfig {
    double lr = 1e-2;
    double weight_decay = 0.01;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps_opt = 1e-8;
    int epochs = 30;
    int batch_docs = 8;
    double alpha1 = 0.5;
    double alpha2 = 0.5;
    CsslConfig cssl;
    AugmentConfig augment;
    int max_sentences = 64;
    std::uint64_t seed = 42;
    int feature_dim = 1024;
    int rep_dim = 16;
    int context_window = 1;
};

void validate_train_config(const TrainConfig& cfg);

/// Hashed bag-of-tokens, L2-normalized. A tokenless sentence maps to the
/// constant vector 1/sqrt(F) so downstream cosines stay defined.
Vec featurize(const Sentence& sentence, std::size_t feature_dim);

/// Sparse view of the same featurization; scatter-equal to featurize().
struct SparseFeature {
    std::vector<std::pair<std::size_t, double>> entries;  // (bucket, weight), bucket ascending
};
SparseFeature featurize_sparse(const Sentence& sentence, std::size_t feature_dim);
std::vector<SparseFeature> featurize_document(const std::vector<Sentence>& sentences,
                                              std::size_t feature_dim);

/// h_i = tanh(E x_i + C * mean(E x_j, j in [i-w, i+w], j != i) + b).
/// Boundary positions average over whatever neighbors exist; w = 0 drops the
/// context term entirely.
std::vector<SentenceRep> encode(const std::vector<Vec>& features, const ModelParams& params,
                                int window);
std::vector<SentenceRep> encode_sparse(const std::vector<SparseFeature>& features,
                                       const ModelParams& params, int window);

/// Boundary probability for sentences 0..n-2 (the last sentence carries no
/// label). Probabilities are clamped to the open interval.
Vec seg_probs(const std::vector<SentenceRep>& reps, const ModelParams& params);

/// 3-class rows for each adjacent pair, softmax over the pair head.
std::vector<std::array<double, 3>> tssp_probs(const std::vector<SentenceRep>& reps,
                                              const ModelParams& params);

/// Loss and full parameter gradient for one document: segmentation loss on
/// the original pass, pair-structure loss on the augmented pass (when given),
/// contrastive loss on the original representations (when pair sets given).
struct DocLoss {
    LossReport report;
    ModelParams grads;
};
DocLoss document_loss(const Document& doc, const AugmentedDocument* aug,
                      const std::vector<PairSet>* pairs, const ModelParams& params,
                      const TrainConfig& cfg);

/// Boundary probabilities for a whole document, windowed at max_sentences and
/// merged back (window outputs concatenate; lengths always add up to n-1).
Vec document_probabilities(const Document& doc, const ModelParams& params,
                           const TrainConfig& cfg);
/// Per-sentence representations with the same windowing; overlapped sentences
/// take the representation from the window that owns their boundary position.
std::vector<SentenceRep> document_reps(const Document& doc, const ModelParams& params,
                                       const TrainConfig& cfg);

ModelParams init_params(const TrainConfig& cfg);

/// Decoupled weight decay: theta -= lr * m_hat / (sqrt(v_hat) + eps) + lr * wd * theta.
class AdamW {
public:
    AdamW(const ModelParams& shape, double lr, double weight_decay, double beta1, double beta2,
          double eps);
    void step(ModelParams& params, const ModelParams& grads);
    int steps_taken() const { return t_; }

private:
    double lr_, wd_, beta1_, beta2_, eps_;
    int t_ = 0;
    ModelParams m_, v_;
};

struct EpochLog {
    int epoch = 0;  // 1-based
    double mean_l_ts = 0.0;
    double mean_l_tssp = 0.0;
    double mean_l_cssl = 0.0;
    double mean_l_total = 0.0;
    bool has_dev = false;
    MetricReport dev;  // macro-averaged over the dev corpus
};

struct TrainResult {
    ModelParams params;
    TrainConfig config;
    std::vector<EpochLog> log;
    std::size_t n_short_excluded = 0;  // input documents under 2 sentences
};

/// Deterministic for a fixed seed (single-threaded). Aux passes are skipped
/// outright when their weight is zero, so an alpha1 = alpha2 = 0 run touches
/// neither the augmenter nor the pair builder. Throws on non-finite loss,
/// naming the offending document.
TrainResult train(const std::vector<Document>& corpus, const TrainConfig& cfg,
                  const std::vector<Document>* dev = nullptr);

MetricReport evaluate_dev(const std::vector<Document>& dev, const ModelParams& params,
                          const TrainConfig& cfg);

void save_checkpoint(const ModelParams& params, const TrainConfig& cfg, const std::string& path);
struct Checkpoint {
    ModelParams params;
    TrainConfig config;
};
Checkpoint load_checkpoint(const std::string& path);

}  // namespace topseg
