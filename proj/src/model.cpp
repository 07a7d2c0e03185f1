#include "topseg/model.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <stdexcept>

#include "json.hpp"
#include "topseg/rng.hpp"

namespace topseg {

using nlohmann::json;

namespace {

template <typename P>
auto tensor_list(P& p) {
    return std::array{&p.embed.data, &p.ctx.data, &p.bias, &p.seg_w.data,
                      &p.seg_b,      &p.tssp_w.data, &p.tssp_b};
}

double clamp_prob(double p) {
    return std::clamp(p, kProbClamp, 1.0 - kProbClamp);
}

void softmax2(const double z0, const double z1, double& p0, double& p1) {
    const double m = std::max(z0, z1);
    const double e0 = std::exp(z0 - m);
    const double e1 = std::exp(z1 - m);
    p0 = e0 / (e0 + e1);
    p1 = e1 / (e0 + e1);
}

std::array<double, 3> softmax3(const std::array<double, 3>& z) {
    const double m = std::max({z[0], z[1], z[2]});
    std::array<double, 3> e{std::exp(z[0] - m), std::exp(z[1] - m), std::exp(z[2] - m)};
    const double s = e[0] + e[1] + e[2];
    for (double& x : e) x /= s;
    // keep rows strictly inside the simplex
    double renorm = 0.0;
    for (double& x : e) {
        x = std::max(x, kProbClamp);
        renorm += x;
    }
    for (double& x : e) x /= renorm;
    return e;
}

}  // namespace

ModelParams zeros_like(const ModelParams& p) {
    ModelParams z;
    z.embed = Matrix(p.embed.rows, p.embed.cols);
    z.ctx = Matrix(p.ctx.rows, p.ctx.cols);
    z.bias.assign(p.bias.size(), 0.0);
    z.seg_w = Matrix(p.seg_w.rows, p.seg_w.cols);
    z.seg_b.assign(p.seg_b.size(), 0.0);
    z.tssp_w = Matrix(p.tssp_w.rows, p.tssp_w.cols);
    z.tssp_b.assign(p.tssp_b.size(), 0.0);
    return z;
}

void axpy_params(ModelParams& acc, const ModelParams& g, double scale) {
    auto dst = tensor_list(acc);
    auto src = tensor_list(g);
    for (std::size_t t = 0; t < dst.size(); ++t) {
        if (dst[t]->size() != src[t]->size()) {
            throw std::invalid_argument("axpy_params: shape mismatch");
        }
        for (std::size_t i = 0; i < dst[t]->size(); ++i) {
            (*dst[t])[i] += scale * (*src[t])[i];
        }
    }
}

void scale_params(ModelParams& p, double scale) {
    for (Vec* t : tensor_list(p)) {
        for (double& x : *t) x *= scale;
    }
}

Vec flatten_params(const ModelParams& p) {
    Vec flat;
    for (const Vec* t : tensor_list(p)) {
        flat.insert(flat.end(), t->begin(), t->end());
    }
    return flat;
}

void unflatten_params(const Vec& flat, ModelParams& p) {
    std::size_t pos = 0;
    for (Vec* t : tensor_list(p)) {
        if (pos + t->size() > flat.size()) {
            throw std::invalid_argument("unflatten_params: size mismatch");
        }
        std::copy(flat.begin() + pos, flat.begin() + pos + t->size(), t->begin());
        pos += t->size();
    }
    if (pos != flat.size()) throw std::invalid_argument("unflatten_params: size mismatch");
}

void validate_train_config(const TrainConfig& cfg) {
    if (!(cfg.lr >= 0.0)) throw std::invalid_argument("lr must be >= 0");
    if (cfg.weight_decay < 0.0) throw std::invalid_argument("weight_decay must be >= 0");
    if (!(cfg.beta1 >= 0.0 && cfg.beta1 < 1.0) || !(cfg.beta2 >= 0.0 && cfg.beta2 < 1.0)) {
        throw std::invalid_argument("beta1/beta2 must be in [0, 1)");
    }
    if (!(cfg.eps_opt > 0.0)) throw std::invalid_argument("eps_opt must be > 0");
    if (cfg.epochs < 1) throw std::invalid_argument("epochs must be >= 1");
    if (cfg.batch_docs < 1) throw std::invalid_argument("batch_docs must be >= 1");
    if (cfg.alpha1 < 0.0 || cfg.alpha2 < 0.0) throw std::invalid_argument("loss weights must be >= 0");
    if (cfg.max_sentences < 2) throw std::invalid_argument("max_sentences must be >= 2");
    if (cfg.feature_dim < 8) throw std::invalid_argument("feature_dim must be >= 8");
    if (cfg.rep_dim < 1) throw std::invalid_argument("rep_dim must be >= 1");
    if (cfg.context_window < 0) throw std::invalid_argument("context_window must be >= 0");
    validate_cssl_config(cfg.cssl);
    if (!(cfg.augment.p1 >= 0.0 && cfg.augment.p1 <= 1.0) ||
        !(cfg.augment.p2 >= 0.0 && cfg.augment.p2 <= 1.0)) {
        throw std::invalid_argument("augment p1/p2 must be in [0, 1]");
    }
}

SparseFeature featurize_sparse(const Sentence& sentence, std::size_t feature_dim) {
    if (feature_dim < 8) throw std::invalid_argument("featurize: feature_dim must be >= 8");
    SparseFeature out;
    if (sentence.tokens.empty()) {
        // degenerate fallback: uniform constant vector with unit L2 norm
        const double v = 1.0 / std::sqrt(static_cast<double>(feature_dim));
        out.entries.reserve(feature_dim);
        for (std::size_t i = 0; i < feature_dim; ++i) out.entries.emplace_back(i, v);
        return out;
    }
    std::map<std::size_t, double> counts;
    for (const auto& tok : sentence.tokens) {
        counts[fnv1a_hash(tok) % feature_dim] += 1.0;
    }
    double norm_sq = 0.0;
    for (const auto& [idx, c] : counts) norm_sq += c * c;
    const double inv_norm = 1.0 / std::sqrt(norm_sq);
    out.entries.reserve(counts.size());
    for (const auto& [idx, c] : counts) out.entries.emplace_back(idx, c * inv_norm);
    return out;
}

Vec featurize(const Sentence& sentence, std::size_t feature_dim) {
    Vec dense(feature_dim, 0.0);
    for (const auto& [idx, v] : featurize_sparse(sentence, feature_dim).entries) {
        dense[idx] = v;
    }
    return dense;
}

std::vector<SparseFeature> featurize_document(const std::vector<Sentence>& sentences,
                                              std::size_t feature_dim) {
    std::vector<SparseFeature> feats;
    feats.reserve(sentences.size());
    for (const auto& s : sentences) feats.push_back(featurize_sparse(s, feature_dim));
    return feats;
}

namespace {

struct EncodeCache {
    std::vector<Vec> u;  // E x_i
    std::vector<Vec> c;  // neighbor-context mean
    std::vector<SentenceRep> h;
};

void check_encoder_dims(const ModelParams& p) {
    const std::size_t d = p.rep_dim();
    if (p.ctx.rows != d || p.ctx.cols != d || p.bias.size() != d || p.seg_w.cols != d ||
        p.seg_w.rows != 2 || p.seg_b.size() != 2 || p.tssp_w.cols != 2 * d ||
        p.tssp_w.rows != 3 || p.tssp_b.size() != 3) {
        throw std::invalid_argument("model parameters have inconsistent dimensions");
    }
}

EncodeCache encode_forward(const std::vector<SparseFeature>& feats, const ModelParams& params,
                           int window) {
    check_encoder_dims(params);
    const std::size_t n = feats.size();
    const std::size_t d = params.rep_dim();
    const std::size_t f = params.feature_dim();
    EncodeCache cache;
    cache.u.assign(n, Vec(d, 0.0));
    cache.c.assign(n, Vec(d, 0.0));
    cache.h.assign(n, Vec(d, 0.0));

    for (std::size_t i = 0; i < n; ++i) {
        for (const auto& [idx, val] : feats[i].entries) {
            if (idx >= f) throw std::invalid_argument("encode: feature index out of range");
            const double* row = &params.embed.data[idx * d];
            for (std::size_t k = 0; k < d; ++k) cache.u[i][k] += val * row[k];
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t lo = i >= static_cast<std::size_t>(window) ? i - window : 0;
        const std::size_t hi = std::min(n - 1, i + static_cast<std::size_t>(window));
        std::size_t count = 0;
        for (std::size_t j = lo; j <= hi; ++j) {
            if (j == i) continue;
            for (std::size_t k = 0; k < d; ++k) cache.c[i][k] += cache.u[j][k];
            ++count;
        }
        if (count > 0) {
            const double inv = 1.0 / static_cast<double>(count);
            for (std::size_t k = 0; k < d; ++k) cache.c[i][k] *= inv;
        }
        for (std::size_t r = 0; r < d; ++r) {
            double a = cache.u[i][r] + params.bias[r];
            const double* ctx_row = &params.ctx.data[r * d];
            for (std::size_t k = 0; k < d; ++k) a += ctx_row[k] * cache.c[i][k];
            cache.h[i][r] = std::tanh(a);
        }
    }
    return cache;
}

// Accumulates d loss / d {embed, ctx, bias} given d loss / d h.
void encode_backward(const std::vector<SparseFeature>& feats, const EncodeCache& cache,
                     const std::vector<Vec>& dh, const ModelParams& params, int window,
                     ModelParams& grads) {
    const std::size_t n = feats.size();
    const std::size_t d = params.rep_dim();
    std::vector<Vec> du(n, Vec(d, 0.0));
    Vec da(d), dc(d);

    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t r = 0; r < d; ++r) {
            da[r] = dh[i][r] * (1.0 - cache.h[i][r] * cache.h[i][r]);
            grads.bias[r] += da[r];
            du[i][r] += da[r];
        }
        // ctx term: a += C c_i
        for (std::size_t r = 0; r < d; ++r) {
            double* ctx_grad_row = &grads.ctx.data[r * d];
            for (std::size_t k = 0; k < d; ++k) ctx_grad_row[k] += da[r] * cache.c[i][k];
        }
        const std::size_t lo = i >= static_cast<std::size_t>(window) ? i - window : 0;
        const std::size_t hi = std::min(n - 1, i + static_cast<std::size_t>(window));
        std::size_t count = (hi - lo + 1) - 1;
        if (count == 0) continue;
        for (std::size_t k = 0; k < d; ++k) {
            double s = 0.0;
            for (std::size_t r = 0; r < d; ++r) s += params.ctx.data[r * d + k] * da[r];
            dc[k] = s / static_cast<double>(count);
        }
        for (std::size_t j = lo; j <= hi; ++j) {
            if (j == i) continue;
            for (std::size_t k = 0; k < d; ++k) du[j][k] += dc[k];
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (const auto& [idx, val] : feats[i].entries) {
            double* row = &grads.embed.data[idx * d];
            for (std::size_t k = 0; k < d; ++k) row[k] += val * du[i][k];
        }
    }
}

std::vector<SparseFeature> sparsify(const std::vector<Vec>& features, std::size_t feature_dim) {
    std::vector<SparseFeature> sparse;
    sparse.reserve(features.size());
    for (const auto& x : features) {
        if (x.size() != feature_dim) {
            throw std::invalid_argument("encode: feature vector dimension mismatch");
        }
        SparseFeature s;
        for (std::size_t i = 0; i < x.size(); ++i) {
            if (x[i] != 0.0) s.entries.emplace_back(i, x[i]);
        }
        sparse.push_back(std::move(s));
    }
    return sparse;
}

}  // namespace

std::vector<SentenceRep> encode_sparse(const std::vector<SparseFeature>& features,
                                       const ModelParams& params, int window) {
    return encode_forward(features, params, window).h;
}

std::vector<SentenceRep> encode(const std::vector<Vec>& features, const ModelParams& params,
                                int window) {
    return encode_sparse(sparsify(features, params.feature_dim()), params, window);
}

Vec seg_probs(const std::vector<SentenceRep>& reps, const ModelParams& params) {
    check_encoder_dims(params);
    Vec probs;
    if (reps.size() < 2) return probs;
    const std::size_t d = params.rep_dim();
    probs.reserve(reps.size() - 1);
    for (std::size_t i = 0; i + 1 < reps.size(); ++i) {
        if (reps[i].size() != d) throw std::invalid_argument("seg_probs: rep dimension mismatch");
        double z0 = params.seg_b[0], z1 = params.seg_b[1];
        for (std::size_t k = 0; k < d; ++k) {
            z0 += params.seg_w.data[k] * reps[i][k];
            z1 += params.seg_w.data[d + k] * reps[i][k];
        }
        double p0, p1;
        softmax2(z0, z1, p0, p1);
        probs.push_back(clamp_prob(p1));
    }
    return probs;
}

std::vector<std::array<double, 3>> tssp_probs(const std::vector<SentenceRep>& reps,
                                              const ModelParams& params) {
    check_encoder_dims(params);
    std::vector<std::array<double, 3>> rows;
    if (reps.size() < 2) return rows;
    const std::size_t d = params.rep_dim();
    rows.reserve(reps.size() - 1);
    for (std::size_t i = 0; i + 1 < reps.size(); ++i) {
        std::array<double, 3> z{params.tssp_b[0], params.tssp_b[1], params.tssp_b[2]};
        for (std::size_t r = 0; r < 3; ++r) {
            const double* wrow = &params.tssp_w.data[r * 2 * d];
            double s = 0.0;
            for (std::size_t k = 0; k < d; ++k) s += wrow[k] * reps[i][k];
            for (std::size_t k = 0; k < d; ++k) s += wrow[d + k] * reps[i + 1][k];
            z[r] += s;
        }
        rows.push_back(softmax3(z));
    }
    return rows;
}

DocLoss document_loss(const Document& doc, const AugmentedDocument* aug,
                      const std::vector<PairSet>* pairs, const ModelParams& params,
                      const TrainConfig& cfg) {
    validate_document(doc);
    check_encoder_dims(params);
    const std::size_t d = params.rep_dim();
    const int w = cfg.context_window;

    DocLoss out;
    out.grads = zeros_like(params);

    // --- original-document pass: segmentation loss (+ contrastive term) ---
    const auto feats = featurize_document(doc.sentences, params.feature_dim());
    const EncodeCache cache = encode_forward(feats, params, w);
    const std::size_t n = doc.size();
    std::vector<Vec> dh(n, Vec(d, 0.0));

    const BoundaryLabels labels = boundary_labels(doc);
    const Vec probs = seg_probs(cache.h, params);
    const TsLoss ts = loss_ts(probs, labels);
    out.report.l_ts = ts.value;

    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double p = probs[i];
        const double dz1 = ts.grad_probs[i] * p * (1.0 - p);  // dL/dz_boundary
        // z0 gets -dz1 by softmax symmetry
        for (std::size_t k = 0; k < d; ++k) {
            out.grads.seg_w.data[k] += -dz1 * cache.h[i][k];
            out.grads.seg_w.data[d + k] += dz1 * cache.h[i][k];
            dh[i][k] += -dz1 * params.seg_w.data[k] + dz1 * params.seg_w.data[d + k];
        }
        out.grads.seg_b[0] += -dz1;
        out.grads.seg_b[1] += dz1;
    }

    if (pairs != nullptr && cfg.alpha2 > 0.0) {
        const CsslLoss cssl = loss_cssl(cache.h, *pairs, cfg.cssl.tau);
        out.report.l_cssl = cssl.value;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t k = 0; k < d; ++k) {
                dh[i][k] += cfg.alpha2 * cssl.grad_reps[i][k];
            }
        }
    }
    encode_backward(feats, cache, dh, params, w, out.grads);

    // --- augmented-document pass: pair-structure loss ---
    if (aug != nullptr && cfg.alpha1 > 0.0 && aug->sentences.size() >= 2) {
        const auto afeats = featurize_document(aug->sentences, params.feature_dim());
        const EncodeCache acache = encode_forward(afeats, params, w);
        const std::size_t m = aug->sentences.size();
        const auto rows = tssp_probs(acache.h, params);
        const TsspLoss tssp = loss_tssp(rows, aug->tssp_labels);
        out.report.l_tssp = tssp.value;

        std::vector<Vec> dha(m, Vec(d, 0.0));
        for (std::size_t i = 0; i + 1 < m; ++i) {
            // chain d loss / d row through the softmax jacobian
            std::array<double, 3> dz{0.0, 0.0, 0.0};
            for (std::size_t j = 0; j < 3; ++j) {
                const double g = tssp.grad_rows[i][j];
                if (g == 0.0) continue;
                for (std::size_t k = 0; k < 3; ++k) {
                    const double jac = rows[i][j] * ((j == k ? 1.0 : 0.0) - rows[i][k]);
                    dz[k] += g * jac;
                }
            }
            for (std::size_t r = 0; r < 3; ++r) {
                const double gz = cfg.alpha1 * dz[r];
                double* wgrad_row = &out.grads.tssp_w.data[r * 2 * d];
                const double* wrow = &params.tssp_w.data[r * 2 * d];
                for (std::size_t k = 0; k < d; ++k) {
                    wgrad_row[k] += gz * acache.h[i][k];
                    wgrad_row[d + k] += gz * acache.h[i + 1][k];
                    dha[i][k] += gz * wrow[k];
                    dha[i + 1][k] += gz * wrow[d + k];
                }
                out.grads.tssp_b[r] += gz;
            }
        }
        encode_backward(afeats, acache, dha, params, w, out.grads);
    }

    out.report.l_total =
        loss_total(out.report.l_ts, out.report.l_tssp, out.report.l_cssl, cfg.alpha1, cfg.alpha2);
    return out;
}

Vec document_probabilities(const Document& doc, const ModelParams& params,
                           const TrainConfig& cfg) {
    validate_document(doc);
    if (doc.size() < 2) return {};
    Vec merged;
    for (const Document& w : sliding_windows(doc, static_cast<std::size_t>(cfg.max_sentences))) {
        const auto feats = featurize_document(w.sentences, params.feature_dim());
        const auto reps = encode_sparse(feats, params, cfg.context_window);
        const Vec probs = seg_probs(reps, params);
        merged.insert(merged.end(), probs.begin(), probs.end());
    }
    return merged;
}

std::vector<SentenceRep> document_reps(const Document& doc, const ModelParams& params,
                                       const TrainConfig& cfg) {
    validate_document(doc);
    std::vector<SentenceRep> merged;
    bool first = true;
    for (const Document& w : sliding_windows(doc, static_cast<std::size_t>(cfg.max_sentences))) {
        const auto feats = featurize_document(w.sentences, params.feature_dim());
        auto reps = encode_sparse(feats, params, cfg.context_window);
        const std::size_t skip = first ? 0 : 1;  // duplicated overlap sentence
        for (std::size_t i = skip; i < reps.size(); ++i) merged.push_back(std::move(reps[i]));
        first = false;
    }
    return merged;
}

ModelParams init_params(const TrainConfig& cfg) {
    validate_train_config(cfg);
    const std::size_t f = static_cast<std::size_t>(cfg.feature_dim);
    const std::size_t d = static_cast<std::size_t>(cfg.rep_dim);
    ModelParams p;
    p.embed = Matrix(f, d);
    p.ctx = Matrix(d, d);
    p.bias.assign(d, 0.0);
    p.seg_w = Matrix(2, d);
    p.seg_b.assign(2, 0.0);
    p.tssp_w = Matrix(3, 2 * d);
    p.tssp_b.assign(3, 0.0);

    RngStream rng(derive_stream(cfg.seed, "param-init"));
    auto fill_uniform = [&rng](Vec& v, double limit) {
        for (double& x : v) x = (2.0 * rng.next_double() - 1.0) * limit;
    };
    fill_uniform(p.embed.data, std::sqrt(6.0 / static_cast<double>(f + d)));
    fill_uniform(p.ctx.data, std::sqrt(6.0 / static_cast<double>(2 * d)));
    fill_uniform(p.seg_w.data, std::sqrt(6.0 / static_cast<double>(d + 2)));
    fill_uniform(p.tssp_w.data, std::sqrt(6.0 / static_cast<double>(2 * d + 3)));
    return p;
}

AdamW::AdamW(const ModelParams& shape, double lr, double weight_decay, double beta1, double beta2,
             double eps)
    : lr_(lr), wd_(weight_decay), beta1_(beta1), beta2_(beta2), eps_(eps),
      m_(zeros_like(shape)), v_(zeros_like(shape)) {}

void AdamW::step(ModelParams& params, const ModelParams& grads) {
    ++t_;
    const double bc1 = 1.0 - std::pow(beta1_, t_);
    const double bc2 = 1.0 - std::pow(beta2_, t_);
    auto pt = tensor_list(params);
    auto gt = tensor_list(const_cast<ModelParams&>(grads));
    auto mt = tensor_list(m_);
    auto vt = tensor_list(v_);
    for (std::size_t t = 0; t < pt.size(); ++t) {
        Vec& theta = *pt[t];
        const Vec& g = *gt[t];
        Vec& m = *mt[t];
        Vec& v = *vt[t];
        for (std::size_t i = 0; i < theta.size(); ++i) {
            m[i] = beta1_ * m[i] + (1.0 - beta1_) * g[i];
            v[i] = beta2_ * v[i] + (1.0 - beta2_) * g[i] * g[i];
            const double m_hat = m[i] / bc1;
            const double v_hat = v[i] / bc2;
            theta[i] -= lr_ * (m_hat / (std::sqrt(v_hat) + eps_)) + lr_ * wd_ * theta[i];
        }
    }
}

MetricReport evaluate_dev(const std::vector<Document>& dev, const ModelParams& params,
                          const TrainConfig& cfg) {
    std::vector<std::string> ids;
    std::vector<BoundaryLabels> refs, hyps;
    std::vector<std::vector<bool>> masks;
    bool any_flags = false;
    for (const auto& doc : dev) {
        if (doc.size() < 2) continue;
        ids.push_back(doc.doc_id);
        refs.push_back(boundary_labels(doc));
        const Vec probs = document_probabilities(doc, params, cfg);
        const std::vector<bool> mask = candidate_mask(doc);
        BoundaryLabels hyp(probs.size(), 0);
        for (std::size_t i = 0; i < probs.size(); ++i) {
            hyp[i] = (probs[i] >= 0.5 && mask[i]) ? 1 : 0;
        }
        hyps.push_back(std::move(hyp));
        any_flags = any_flags || has_candidate_flags(doc);
        masks.push_back(mask);
    }
    const CorpusMetrics cm = evaluate_corpus(ids, refs, hyps, any_flags ? &masks : nullptr);
    return cm.macro;
}

namespace {

void truncate_augmented(AugmentedDocument& aug, std::size_t max_sentences) {
    if (aug.sentences.size() <= max_sentences) return;
    aug.sentences.resize(max_sentences);
    aug.provenance.resize(max_sentences);
    aug.tssp_labels.resize(max_sentences - 1);
}

}  // namespace

TrainResult train(const std::vector<Document>& corpus, const TrainConfig& cfg,
                  const std::vector<Document>* dev) {
    validate_train_config(cfg);
    if (corpus.size() < 2) {
        throw std::invalid_argument("training corpus must contain at least 2 documents");
    }

    TrainResult result;
    result.config = cfg;

    // Training units are sliding windows; documents too short to carry a
    // boundary label are dropped (count reported in the result).
    std::vector<Document> units;
    for (const auto& doc : corpus) {
        validate_document(doc);
        if (doc.size() < 2) {
            ++result.n_short_excluded;
            continue;
        }
        for (auto& w : sliding_windows(doc, static_cast<std::size_t>(cfg.max_sentences))) {
            units.push_back(std::move(w));
        }
    }
    if (units.empty()) {
        throw std::invalid_argument("no trainable documents (all have fewer than 2 sentences)");
    }

    std::vector<std::vector<PairSet>> unit_pairs;
    if (cfg.alpha2 > 0.0) {
        unit_pairs.reserve(units.size());
        for (const auto& u : units) unit_pairs.push_back(build_pairs(u, cfg.cssl));
    }

    ModelParams params = init_params(cfg);
    AdamW opt(params, cfg.lr, cfg.weight_decay, cfg.beta1, cfg.beta2, cfg.eps_opt);
    RngStream order_rng(derive_stream(cfg.seed, "doc-order"));

    std::vector<std::size_t> order(units.size());
    std::iota(order.begin(), order.end(), 0);

    for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
        order_rng.shuffle(order);
        AugmentConfig epoch_aug = cfg.augment;
        epoch_aug.seed = mix_seed(cfg.augment.seed, static_cast<std::uint64_t>(epoch));

        double sum_ts = 0.0, sum_tssp = 0.0, sum_cssl = 0.0, sum_total = 0.0;
        for (std::size_t b = 0; b < order.size(); b += static_cast<std::size_t>(cfg.batch_docs)) {
            const std::size_t b_end =
                std::min(order.size(), b + static_cast<std::size_t>(cfg.batch_docs));
            ModelParams acc = zeros_like(params);
            for (std::size_t oi = b; oi < b_end; ++oi) {
                const std::size_t idx = order[oi];
                const Document& unit = units[idx];

                AugmentedDocument aug;
                bool have_aug = false;
                if (cfg.alpha1 > 0.0) {
                    AugmentConfig ac = epoch_aug;
                    ac.seed = mix_seed(epoch_aug.seed, static_cast<std::uint64_t>(idx));
                    aug = augment_document(unit, units, ac);
                    truncate_augmented(aug, static_cast<std::size_t>(cfg.max_sentences));
                    have_aug = true;
                }
                const DocLoss dl = document_loss(
                    unit, have_aug ? &aug : nullptr,
                    cfg.alpha2 > 0.0 ? &unit_pairs[idx] : nullptr, params, cfg);
                if (!std::isfinite(dl.report.l_total)) {
                    throw std::runtime_error("non-finite loss while training on document '" +
                                             unit.doc_id + "'");
                }
                sum_ts += dl.report.l_ts;
                sum_tssp += dl.report.l_tssp;
                sum_cssl += dl.report.l_cssl;
                sum_total += dl.report.l_total;
                axpy_params(acc, dl.grads, 1.0);
            }
            scale_params(acc, 1.0 / static_cast<double>(b_end - b));
            opt.step(params, acc);
        }

        EpochLog log;
        log.epoch = epoch;
        const double inv_n = 1.0 / static_cast<double>(units.size());
        log.mean_l_ts = sum_ts * inv_n;
        log.mean_l_tssp = sum_tssp * inv_n;
        log.mean_l_cssl = sum_cssl * inv_n;
        log.mean_l_total = sum_total * inv_n;
        if (dev != nullptr && !dev->empty()) {
            log.has_dev = true;
            log.dev = evaluate_dev(*dev, params, cfg);
        }
        result.log.push_back(log);
    }

    result.params = std::move(params);
    return result;
}

// ---------------------------------------------------------------------------
// checkpoint serialization
// ---------------------------------------------------------------------------

namespace {

json matrix_to_json(const Matrix& m) {
    return json{{"rows", m.rows}, {"cols", m.cols}, {"data", m.data}};
}

Matrix matrix_from_json(const json& j) {
    Matrix m(j.at("rows").get<std::size_t>(), j.at("cols").get<std::size_t>());
    m.data = j.at("data").get<Vec>();
    if (m.data.size() != m.rows * m.cols) {
        throw std::invalid_argument("checkpoint: matrix data size mismatch");
    }
    return m;
}

json config_to_json(const TrainConfig& c) {
    return json{
        {"lr", c.lr},
        {"weight_decay", c.weight_decay},
        {"beta1", c.beta1},
        {"beta2", c.beta2},
        {"eps_opt", c.eps_opt},
        {"epochs", c.epochs},
        {"batch_docs", c.batch_docs},
        {"alpha1", c.alpha1},
        {"alpha2", c.alpha2},
        {"cssl", {{"k1", c.cssl.k1}, {"k2", c.cssl.k2}, {"tau", c.cssl.tau}}},
        {"augment",
         {{"p1", c.augment.p1},
          {"p2", c.augment.p2},
          {"shuffle_topics", c.augment.shuffle_topics},
          {"shuffle_sentences", c.augment.shuffle_sentences},
          {"seed", c.augment.seed}}},
        {"max_sentences", c.max_sentences},
        {"seed", c.seed},
        {"feature_dim", c.feature_dim},
        {"rep_dim", c.rep_dim},
        {"context_window", c.context_window},
    };
}

TrainConfig config_from_json(const json& j) {
    TrainConfig c;
    c.lr = j.at("lr").get<double>();
    c.weight_decay = j.at("weight_decay").get<double>();
    c.beta1 = j.at("beta1").get<double>();
    c.beta2 = j.at("beta2").get<double>();
    c.eps_opt = j.at("eps_opt").get<double>();
    c.epochs = j.at("epochs").get<int>();
    c.batch_docs = j.at("batch_docs").get<int>();
    c.alpha1 = j.at("alpha1").get<double>();
    c.alpha2 = j.at("alpha2").get<double>();
    c.cssl.k1 = j.at("cssl").at("k1").get<int>();
    c.cssl.k2 = j.at("cssl").at("k2").get<int>();
    c.cssl.tau = j.at("cssl").at("tau").get<double>();
    c.augment.p1 = j.at("augment").at("p1").get<double>();
    c.augment.p2 = j.at("augment").at("p2").get<double>();
    c.augment.shuffle_topics = j.at("augment").at("shuffle_topics").get<bool>();
    c.augment.shuffle_sentences = j.at("augment").at("shuffle_sentences").get<bool>();
    c.augment.seed = j.at("augment").at("seed").get<std::uint64_t>();
    c.max_sentences = j.at("max_sentences").get<int>();
    c.seed = j.at("seed").get<std::uint64_t>();
    c.feature_dim = j.at("feature_dim").get<int>();
    c.rep_dim = j.at("rep_dim").get<int>();
    c.context_window = j.at("context_window").get<int>();
    return c;
}

}  // namespace

void save_checkpoint(const ModelParams& params, const TrainConfig& cfg, const std::string& path) {
    json j;
    j["format"] = "topseg-checkpoint";
    j["version"] = 1;
    j["config"] = config_to_json(cfg);
    j["params"] = {
        {"embed", matrix_to_json(params.embed)}, {"ctx", matrix_to_json(params.ctx)},
        {"bias", params.bias},                   {"seg_w", matrix_to_json(params.seg_w)},
        {"seg_b", params.seg_b},                 {"tssp_w", matrix_to_json(params.tssp_w)},
        {"tssp_b", params.tssp_b},
    };
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write checkpoint: " + path);
    out << j.dump() << '\n';
    if (!out) throw std::runtime_error("write failed: " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open checkpoint: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw std::runtime_error("malformed checkpoint " + path + ": " + e.what());
    }
    if (j.value("format", "") != "topseg-checkpoint") {
        throw std::runtime_error("not a topseg checkpoint: " + path);
    }
    Checkpoint ckpt;
    ckpt.config = config_from_json(j.at("config"));
    const json& p = j.at("params");
    ckpt.params.embed = matrix_from_json(p.at("embed"));
    ckpt.params.ctx = matrix_from_json(p.at("ctx"));
    ckpt.params.bias = p.at("bias").get<Vec>();
    ckpt.params.seg_w = matrix_from_json(p.at("seg_w"));
    ckpt.params.seg_b = p.at("seg_b").get<Vec>();
    ckpt.params.tssp_w = matrix_from_json(p.at("tssp_w"));
    ckpt.params.tssp_b = p.at("tssp_b").get<Vec>();
    check_encoder_dims(ckpt.params);
    return ckpt;
}

}  // namespace topseg
