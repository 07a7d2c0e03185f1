#include <stdexcept>
#include <cmath>
#include <filesystem>
#include <numeric>

#include "doctest.h"
#include "oracles.hpp"
#include "test_util.hpp"
#include "topseg/model.hpp"

using namespace topseg;
using testutil::doc_from_topics;
using testutil::random_doc;

namespace {

TrainConfig tiny_config() {
    TrainConfig cfg;
    cfg.feature_dim = 16;
    cfg.rep_dim = 4;
    cfg.context_window = 1;
    cfg.max_sentences = 16;
    cfg.epochs = 2;
    cfg.batch_docs = 2;
    cfg.seed = 7;
    return cfg;
}

Sentence sentence_of(std::initializer_list<const char*> toks) {
    Sentence s;
    for (const char* t : toks) s.tokens.emplace_back(t);
    return s;
}

}  // namespace

TEST_CASE("featurize is a deterministic function of the token multiset") {
    const Sentence a = sentence_of({"alpha", "beta", "beta", "gamma"});
    const Sentence b = sentence_of({"beta", "gamma", "alpha", "beta"});
    CHECK(featurize(a, 64) == featurize(b, 64));

    double norm_sq = 0.0;
    for (double x : featurize(a, 64)) norm_sq += x * x;
    CHECK(norm_sq == doctest::Approx(1.0).epsilon(1e-12));

    CHECK_THROWS_AS(featurize(a, 4), std::invalid_argument);
}

TEST_CASE("featurize fallback for tokenless sentences") {
    Sentence empty;
    const Vec v = featurize(empty, 32);
    for (double x : v) CHECK(x == doctest::Approx(1.0 / std::sqrt(32.0)).epsilon(1e-12));
}

TEST_CASE("featurize keeps disjoint vocabularies nearly orthogonal at F=4096") {
    RngStream rng(42);
    for (int trial = 0; trial < 20; ++trial) {
        Sentence a, b;
        for (int i = 0; i < 10; ++i) {
            a.tokens.push_back("left" + std::to_string(trial) + "_" + std::to_string(i));
            b.tokens.push_back("right" + std::to_string(trial) + "_" + std::to_string(i));
        }
        CHECK(oracle::cosine_definitional(featurize(a, 4096), featurize(b, 4096)) < 0.2);
    }
}

TEST_CASE("dense featurize equals scattered sparse featurize") {
    const Sentence s = sentence_of({"x", "y", "x", "z", "w"});
    const Vec dense = featurize(s, 128);
    Vec scattered(128, 0.0);
    for (const auto& [idx, val] : featurize_sparse(s, 128).entries) scattered[idx] = val;
    CHECK(dense == scattered);
}

TEST_CASE("encode locality and degenerate cases") {
    const TrainConfig cfg = tiny_config();
    const ModelParams params = init_params(cfg);
    const Document doc = doc_from_topics("enc", {3, 3});
    std::vector<Vec> feats;
    for (const auto& s : doc.sentences) feats.push_back(featurize(s, params.feature_dim()));

    SUBCASE("w=0 depends only on the sentence itself") {
        const auto reps = encode(feats, params, 0);
        // swap other sentences: h_0 unchanged
        auto shuffled = feats;
        std::swap(shuffled[1], shuffled[4]);
        const auto reps2 = encode(shuffled, params, 0);
        CHECK(reps[0] == reps2[0]);
        CHECK(reps[3] == reps2[3]);
    }
    SUBCASE("permuting sentences outside the window leaves h_i unchanged") {
        const auto reps = encode(feats, params, 1);
        auto moved = feats;
        std::swap(moved[3], moved[5]);  // both outside [0..2] for i=1
        const auto reps2 = encode(moved, params, 1);
        CHECK(reps[1] == reps2[1]);
        CHECK(reps[0] == reps2[0]);
    }
    SUBCASE("all-zero parameters give all-zero representations") {
        const ModelParams zero = zeros_like(params);
        for (const auto& h : encode(feats, zero, 1)) {
            for (double x : h) CHECK(x == 0.0);
        }
    }
    SUBCASE("dimension mismatch is an error") {
        auto bad = feats;
        bad[0].resize(params.feature_dim() - 1);
        CHECK_THROWS_AS(encode(bad, params, 1), std::invalid_argument);
    }
}

TEST_CASE("seg_probs shape and behavior") {
    const TrainConfig cfg = tiny_config();
    const ModelParams params = init_params(cfg);
    const Document doc = doc_from_topics("seg", {2, 2});
    std::vector<Vec> feats;
    for (const auto& s : doc.sentences) feats.push_back(featurize(s, params.feature_dim()));
    const auto reps = encode(feats, params, 1);

    SUBCASE("zero head weights give 0.5 everywhere, length n-1") {
        ModelParams flat_head = params;
        std::fill(flat_head.seg_w.data.begin(), flat_head.seg_w.data.end(), 0.0);
        std::fill(flat_head.seg_b.begin(), flat_head.seg_b.end(), 0.0);
        const Vec probs = seg_probs(reps, flat_head);
        REQUIRE(probs.size() == doc.size() - 1);
        for (double p : probs) CHECK(p == doctest::Approx(0.5).epsilon(1e-12));
    }
    SUBCASE("single sentence yields an empty list") {
        CHECK(seg_probs({reps[0]}, params).empty());
    }
    SUBCASE("raising the boundary logit raises the probability") {
        const Vec before = seg_probs(reps, params);
        ModelParams bumped = params;
        bumped.seg_b[1] += 0.5;
        const Vec after = seg_probs(reps, bumped);
        for (std::size_t i = 0; i < before.size(); ++i) CHECK(after[i] > before[i]);
    }
}

TEST_CASE("tssp_probs rows are proper order-sensitive distributions") {
    const TrainConfig cfg = tiny_config();
    const ModelParams params = init_params(cfg);
    const Document doc = doc_from_topics("tssp", {3, 2});
    std::vector<Vec> feats;
    for (const auto& s : doc.sentences) feats.push_back(featurize(s, params.feature_dim()));
    const auto reps = encode(feats, params, 1);
    const auto rows = tssp_probs(reps, params);
    REQUIRE(rows.size() == doc.size() - 1);
    for (const auto& row : rows) {
        CHECK(std::abs(row[0] + row[1] + row[2] - 1.0) < 1e-9);
        for (double p : row) {
            CHECK(p > 0.0);
            CHECK(p < 1.0);
        }
    }
    SUBCASE("zero weights give uniform rows") {
        ModelParams zero_head = params;
        std::fill(zero_head.tssp_w.data.begin(), zero_head.tssp_w.data.end(), 0.0);
        std::fill(zero_head.tssp_b.begin(), zero_head.tssp_b.end(), 0.0);
        for (const auto& row : tssp_probs(reps, zero_head)) {
            for (double p : row) CHECK(p == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
        }
    }
    SUBCASE("swapping the pair order changes the row") {
        auto swapped = reps;
        std::swap(swapped[0], swapped[1]);
        const auto rows2 = tssp_probs(swapped, params);
        CHECK(rows[0] != rows2[0]);
    }
}

TEST_CASE("end-to-end gradients pass central differences on tiny instances") {
    RngStream rng(6006);
    TrainConfig cfg = tiny_config();
    for (int trial = 0; trial < 25; ++trial) {
        cfg.seed = mix_seed(100, static_cast<std::uint64_t>(trial));
        std::vector<Document> pool = {random_doc("a" + std::to_string(trial), rng, 3, 2),
                                      random_doc("b" + std::to_string(trial), rng, 3, 2)};
        Document& doc = pool[0];
        if (doc.size() < 2) continue;

        AugmentConfig ac;
        ac.seed = cfg.seed;
        const AugmentedDocument aug = augment_document(doc, pool, ac);
        const auto pairs = build_pairs(doc, cfg.cssl);

        const ModelParams params = init_params(cfg);
        const DocLoss dl = document_loss(doc, &aug, &pairs, params, cfg);

        const Vec analytic = flatten_params(dl.grads);
        ModelParams probe = params;
        const double err = finite_diff_check(
            [&](const Vec& x) {
                unflatten_params(x, probe);
                return document_loss(doc, &aug, &pairs, probe, cfg).report.l_total;
            },
            flatten_params(params), analytic, 1e-5);
        CHECK(err < 1e-3);
    }
}

TEST_CASE("document_loss report composes per the loss weights") {
    RngStream rng(123);
    TrainConfig cfg = tiny_config();
    std::vector<Document> pool = {random_doc("r1", rng, 3, 3), random_doc("r2", rng, 3, 3)};
    AugmentConfig ac;
    const AugmentedDocument aug = augment_document(pool[0], pool, ac);
    const auto pairs = build_pairs(pool[0], cfg.cssl);
    const ModelParams params = init_params(cfg);
    const DocLoss dl = document_loss(pool[0], &aug, &pairs, params, cfg);
    CHECK(std::abs(dl.report.l_total -
                   (dl.report.l_ts + cfg.alpha1 * dl.report.l_tssp +
                    cfg.alpha2 * dl.report.l_cssl)) < 1e-12);
    CHECK(dl.report.l_ts >= 0.0);
    CHECK(dl.report.l_tssp >= 0.0);
    CHECK(dl.report.l_cssl >= 0.0);
}

TEST_CASE("AdamW with lr=0 leaves parameters unchanged") {
    TrainConfig cfg = tiny_config();
    const ModelParams params = init_params(cfg);
    ModelParams updated = params;
    ModelParams grads = zeros_like(params);
    for (double& g : grads.embed.data) g = 1.0;
    AdamW opt(params, 0.0, 0.5, cfg.beta1, cfg.beta2, cfg.eps_opt);
    opt.step(updated, grads);
    CHECK(flatten_params(updated) == flatten_params(params));
}

namespace {

// Minimal segmentation-only trainer: same building blocks, but it never
// touches the augmenter or the pair builder at all.
ModelParams reference_ts_trainer(const std::vector<Document>& corpus, const TrainConfig& cfg) {
    std::vector<Document> units;
    for (const auto& doc : corpus) {
        if (doc.size() < 2) continue;
        for (auto& w : sliding_windows(doc, static_cast<std::size_t>(cfg.max_sentences))) {
            units.push_back(std::move(w));
        }
    }
    ModelParams params = init_params(cfg);
    AdamW opt(params, cfg.lr, cfg.weight_decay, cfg.beta1, cfg.beta2, cfg.eps_opt);
    RngStream order_rng(derive_stream(cfg.seed, "doc-order"));
    std::vector<std::size_t> order(units.size());
    std::iota(order.begin(), order.end(), 0);
    for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
        order_rng.shuffle(order);
        for (std::size_t b = 0; b < order.size(); b += static_cast<std::size_t>(cfg.batch_docs)) {
            const std::size_t b_end =
                std::min(order.size(), b + static_cast<std::size_t>(cfg.batch_docs));
            ModelParams acc = zeros_like(params);
            for (std::size_t oi = b; oi < b_end; ++oi) {
                const DocLoss dl =
                    document_loss(units[order[oi]], nullptr, nullptr, params, cfg);
                axpy_params(acc, dl.grads, 1.0);
            }
            scale_params(acc, 1.0 / static_cast<double>(b_end - b));
            opt.step(params, acc);
        }
    }
    return params;
}

}  // namespace

TEST_CASE("training is deterministic and alpha gating is airtight") {
    SynthConfig scfg;
    scfg.n_docs = 10;
    scfg.seed = 404;
    const auto corpus = synth_corpus(scfg);

    TrainConfig cfg = tiny_config();
    cfg.feature_dim = 64;
    cfg.epochs = 2;

    SUBCASE("same seed, same parameters") {
        const TrainResult a = train(corpus, cfg);
        const TrainResult b = train(corpus, cfg);
        CHECK(flatten_params(a.params) == flatten_params(b.params));
        REQUIRE(a.log.size() == static_cast<std::size_t>(cfg.epochs));
        CHECK(a.log[0].mean_l_ts == b.log[0].mean_l_ts);
    }
    SUBCASE("alpha1=alpha2=0 run is bit-identical to a trainer without aux tasks") {
        TrainConfig plain = cfg;
        plain.alpha1 = 0.0;
        plain.alpha2 = 0.0;
        const TrainResult full = train(corpus, plain);
        const ModelParams ref = reference_ts_trainer(corpus, plain);
        CHECK(flatten_params(full.params) == flatten_params(ref));
        for (const auto& log : full.log) {
            CHECK(log.mean_l_tssp == 0.0);
            CHECK(log.mean_l_cssl == 0.0);
        }
    }
    SUBCASE("short documents are excluded and counted") {
        auto with_short = corpus;
        Document stub;
        stub.doc_id = "stub";
        Sentence s;
        s.index = 0;
        s.tokens = {"only"};
        stub.sentences.push_back(s);
        stub.topic_of = {0};
        with_short.push_back(stub);
        const TrainResult r = train(with_short, cfg);
        CHECK(r.n_short_excluded == 1);
    }
    SUBCASE("corpus of fewer than 2 documents is rejected") {
        CHECK_THROWS_AS(train({corpus[0]}, cfg), std::invalid_argument);
    }
}

TEST_CASE("mean training segmentation loss decreases over the first epochs") {
    SynthConfig scfg;  // generator defaults
    const auto corpus = synth_corpus(scfg);

    TrainConfig cfg;  // trainer defaults
    cfg.epochs = 5;
    const TrainResult r = train(corpus, cfg);
    REQUIRE(r.log.size() == 5);
    for (std::size_t e = 1; e < r.log.size(); ++e) {
        CHECK(r.log[e].mean_l_ts < r.log[e - 1].mean_l_ts);
    }
}

TEST_CASE("checkpoints round-trip exactly") {
    SynthConfig scfg;
    scfg.n_docs = 8;
    scfg.seed = 11;
    const auto corpus = synth_corpus(scfg);
    const std::vector<Document> dev(corpus.begin() + 6, corpus.end());
    const std::vector<Document> tr(corpus.begin(), corpus.begin() + 6);

    TrainConfig cfg = tiny_config();
    cfg.feature_dim = 64;
    const TrainResult r = train(tr, cfg, &dev);

    const auto path =
        (std::filesystem::temp_directory_path() / "topseg_test_ckpt.json").string();
    save_checkpoint(r.params, r.config, path);
    const Checkpoint loaded = load_checkpoint(path);
    CHECK(flatten_params(loaded.params) == flatten_params(r.params));
    CHECK(loaded.config.seed == cfg.seed);
    CHECK(loaded.config.alpha1 == cfg.alpha1);

    const MetricReport before = evaluate_dev(dev, r.params, r.config);
    const MetricReport after = evaluate_dev(dev, loaded.params, loaded.config);
    CHECK(before.f1 == after.f1);
    CHECK(before.pk == after.pk);
    CHECK(before.wd == after.wd);
    std::filesystem::remove(path);

    CHECK_THROWS_AS(load_checkpoint("/nonexistent/model.json"), std::runtime_error);
}
