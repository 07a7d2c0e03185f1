// topseg command line: corpus synthesis, augmentation inspection, contrastive
// pair dumps, training, segmentation, evaluation, and gradient checking.
//
// Exit codes: 0 success, 1 usage or validation error, 2 runtime error.

#include <atomic>
#include <fstream>
#include <iostream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"
#include "topseg/augment.hpp"
#include "topseg/corpus.hpp"
#include "topseg/infer.hpp"
#include "topseg/losses.hpp"
#include "topseg/metrics.hpp"
#include "topseg/model.hpp"
#include "topseg/pairs.hpp"
#include "topseg/rng.hpp"

namespace {

using namespace topseg;
using nlohmann::json;

// Emits the fully resolved option set (file values overridden by flags) in a
// form that can be fed back through --config to reproduce the run.
void print_resolved_config(const CLI::App* sub) {
    std::cerr << "# resolved config\n[" << sub->get_name() << "]\n"
              << sub->config_to_str(true, false) << "# end config\n";
}

// Runs fn(0..n-1) on a small pool; results land in index-addressed slots, so
// output order never depends on scheduling.
template <typename Fn>
void parallel_docs(std::size_t n, int threads, Fn&& fn) {
    threads = std::max(1, threads);
    if (threads == 1 || n < 2) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::string first_error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    const int workers = std::min<int>(threads, static_cast<int>(n));
    for (int t = 0; t < workers; ++t) {
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= n || failed.load()) return;
                try {
                    fn(i);
                } catch (const std::exception& e) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!failed.exchange(true)) first_error = e.what();
                    return;
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (failed.load()) throw std::runtime_error(first_error);
}

struct SynthArgs {
    SynthConfig cfg;
    std::vector<int> topics{3, 8};
    std::vector<int> sentences{3, 6};
    std::vector<int> tokens{4, 10};
    std::string out;
};

void add_synth(CLI::App& app, SynthArgs& args) {
    CLI::App* sub = app.add_subcommand("synth", "Generate a synthetic corpus");
    sub->configurable()->fallthrough();
    sub->add_option("--out", args.out, "Output corpus JSONL path")->required();
    sub->add_option("--n-docs", args.cfg.n_docs, "Number of documents")->capture_default_str();
    sub->add_option("--vocab-clusters", args.cfg.vocab_clusters, "Vocabulary clusters")
        ->capture_default_str();
    sub->add_option("--cluster-vocab", args.cfg.cluster_vocab_size, "Tokens per cluster")
        ->capture_default_str();
    sub->add_option("--topics", args.topics, "Topics per document (lo hi)")
        ->expected(2)
        ->capture_default_str();
    sub->add_option("--sentences", args.sentences, "Sentences per topic (lo hi)")
        ->expected(2)
        ->capture_default_str();
    sub->add_option("--tokens", args.tokens, "Tokens per sentence (lo hi)")
        ->expected(2)
        ->capture_default_str();
    sub->add_option("--noise", args.cfg.noise_rate, "Off-cluster token probability")
        ->capture_default_str();
    sub->add_option("--seed", args.cfg.seed, "RNG seed")->capture_default_str();
    sub->callback([&args, sub] {
        print_resolved_config(sub);
        args.cfg.topics_per_doc = {args.topics[0], args.topics[1]};
        args.cfg.sentences_per_topic = {args.sentences[0], args.sentences[1]};
        args.cfg.tokens_per_sentence = {args.tokens[0], args.tokens[1]};
        save_jsonl(synth_corpus(args.cfg), args.out);
        std::cerr << "wrote " << args.cfg.n_docs << " documents to " << args.out << "\n";
    });
}

struct AugmentArgs {
    AugmentConfig cfg;
    std::string corpus;
    std::string out;
};

void add_augment(CLI::App& app, AugmentArgs& args) {
    CLI::App* sub = app.add_subcommand("augment", "Dump perturbed documents with pair labels");
    sub->configurable()->fallthrough();
    sub->add_option("--corpus", args.corpus, "Input corpus JSONL")->required();
    sub->add_option("--out", args.out, "Output augmented JSONL")->required();
    sub->add_option("--p1", args.cfg.p1, "Document selection probability")->capture_default_str();
    sub->add_option("--p2", args.cfg.p2, "Per-topic replacement probability")
        ->capture_default_str();
    sub->add_option("--shuffle-topics", args.cfg.shuffle_topics,
                    "Permute topic order (true/false)")
        ->capture_default_str();
    sub->add_option("--shuffle-sentences", args.cfg.shuffle_sentences,
                    "Permute sentences within each topic (true/false)")
        ->capture_default_str();
    sub->add_option("--seed", args.cfg.seed, "RNG seed")->capture_default_str();
    sub->callback([&args, sub] {
        print_resolved_config(sub);
        const auto docs = load_jsonl(args.corpus);
        std::ofstream out(args.out, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write " + args.out);
        for (const auto& doc : docs) {
            out << augmented_to_json_line(augment_document(doc, docs, args.cfg)) << '\n';
        }
        std::cerr << "augmented " << docs.size() << " documents into " << args.out << "\n";
    });
}

struct PairsArgs {
    CsslConfig cfg;
    std::string corpus;
    std::string out;
};

void add_pairs(CLI::App& app, PairsArgs& args) {
    CLI::App* sub = app.add_subcommand("pairs", "Dump contrastive pair sets");
    sub->configurable()->fallthrough();
    sub->add_option("--corpus", args.corpus, "Input corpus JSONL")->required();
    sub->add_option("--out", args.out, "Output JSON path")->required();
    sub->add_option("--k1", args.cfg.k1, "Positives per anchor")->capture_default_str();
    sub->add_option("--k2", args.cfg.k2, "Negatives per anchor")->capture_default_str();
    sub->add_option("--tau", args.cfg.tau, "Similarity temperature")->capture_default_str();
    sub->callback([&args, sub] {
        print_resolved_config(sub);
        json all = json::array();
        for (const auto& doc : load_jsonl(args.corpus)) {
            json jdoc;
            jdoc["doc_id"] = doc.doc_id;
            json sets = json::array();
            for (const auto& ps : build_pairs(doc, args.cfg)) {
                sets.push_back({{"anchor", ps.anchor},
                                {"positives", ps.positives},
                                {"negatives", ps.negatives},
                                {"excluded", ps.excluded}});
            }
            jdoc["pair_sets"] = std::move(sets);
            all.push_back(std::move(jdoc));
        }
        std::ofstream out(args.out, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write " + args.out);
        out << all.dump(2) << '\n';
    });
}

struct TrainArgs {
    TrainConfig cfg;
    std::string corpus;
    std::string dev;
    std::string out;
    std::string log_path;
};

void add_train(CLI::App& app, TrainArgs& args) {
    CLI::App* sub = app.add_subcommand("train", "Train a segmenter");
    sub->configurable()->fallthrough();
    sub->add_option("--corpus", args.corpus, "Training corpus JSONL")->required();
    sub->add_option("--dev", args.dev, "Dev corpus JSONL for per-epoch metrics");
    sub->add_option("--out", args.out, "Output checkpoint path")->required();
    sub->add_option("--log", args.log_path, "Per-epoch JSONL log path");
    sub->add_option("--lr", args.cfg.lr, "Learning rate")->capture_default_str();
    sub->add_option("--weight-decay", args.cfg.weight_decay, "Decoupled weight decay")
        ->capture_default_str();
    sub->add_option("--beta1", args.cfg.beta1)->capture_default_str();
    sub->add_option("--beta2", args.cfg.beta2)->capture_default_str();
    sub->add_option("--eps", args.cfg.eps_opt)->capture_default_str();
    sub->add_option("--epochs", args.cfg.epochs)->capture_default_str();
    sub->add_option("--batch-docs", args.cfg.batch_docs)->capture_default_str();
    sub->add_option("--alpha1", args.cfg.alpha1, "Pair-structure loss weight")
        ->capture_default_str();
    sub->add_option("--alpha2", args.cfg.alpha2, "Contrastive loss weight")
        ->capture_default_str();
    sub->add_option("--k1", args.cfg.cssl.k1)->capture_default_str();
    sub->add_option("--k2", args.cfg.cssl.k2)->capture_default_str();
    sub->add_option("--tau", args.cfg.cssl.tau)->capture_default_str();
    sub->add_option("--p1", args.cfg.augment.p1)->capture_default_str();
    sub->add_option("--p2", args.cfg.augment.p2)->capture_default_str();
    sub->add_option("--shuffle-topics", args.cfg.augment.shuffle_topics)
        ->capture_default_str();
    sub->add_option("--shuffle-sentences", args.cfg.augment.shuffle_sentences)
        ->capture_default_str();
    sub->add_option("--aug-seed", args.cfg.augment.seed)->capture_default_str();
    sub->add_option("--max-sentences", args.cfg.max_sentences)->capture_default_str();
    sub->add_option("--seed", args.cfg.seed)->capture_default_str();
    sub->add_option("--feature-dim", args.cfg.feature_dim)->capture_default_str();
    sub->add_option("--rep-dim", args.cfg.rep_dim)->capture_default_str();
    sub->add_option("--window", args.cfg.context_window, "Encoder context window")
        ->capture_default_str();
    sub->callback([&args, sub] {
        print_resolved_config(sub);
        const auto corpus = load_jsonl(args.corpus);
        std::vector<Document> dev;
        if (!args.dev.empty()) dev = load_jsonl(args.dev);
        const TrainResult result = train(corpus, args.cfg, dev.empty() ? nullptr : &dev);
        if (result.n_short_excluded > 0) {
            std::cerr << "excluded " << result.n_short_excluded
                      << " documents shorter than 2 sentences\n";
        }
        for (const auto& e : result.log) {
            std::cerr << "epoch " << e.epoch << " l_ts " << e.mean_l_ts << " l_tssp "
                      << e.mean_l_tssp << " l_cssl " << e.mean_l_cssl;
            if (e.has_dev) {
                std::cerr << " dev_f1 " << e.dev.f1 << " dev_pk " << e.dev.pk << " dev_wd "
                          << e.dev.wd;
            }
            std::cerr << "\n";
        }
        save_checkpoint(result.params, result.config, args.out);
        if (!args.log_path.empty()) {
            std::ofstream lo(args.log_path, std::ios::binary);
            if (!lo) throw std::runtime_error("cannot write " + args.log_path);
            for (const auto& e : result.log) {
                json rec{{"epoch", e.epoch},
                         {"l_ts", e.mean_l_ts},
                         {"l_tssp", e.mean_l_tssp},
                         {"l_cssl", e.mean_l_cssl},
                         {"l_total", e.mean_l_total}};
                if (e.has_dev) {
                    rec["dev_f1"] = e.dev.f1;
                    rec["dev_pk"] = e.dev.pk;
                    rec["dev_wd"] = e.dev.wd;
                }
                lo << rec.dump() << '\n';
            }
        }
        std::cerr << "saved checkpoint to " << args.out << "\n";
    });
}

struct SegmentArgs {
    std::string model;
    std::string corpus;
    std::string out;
    std::string mode = "prob";
    double threshold = 0.5;
    bool sweep = false;
    std::string dev;
    int threads = 1;
};

void add_segment(CLI::App& app, SegmentArgs& args) {
    CLI::App* sub = app.add_subcommand("segment", "Predict topic boundaries");
    sub->configurable()->fallthrough();
    sub->add_option("--model", args.model, "Checkpoint path")->required();
    sub->add_option("--corpus", args.corpus, "Corpus to segment")->required();
    sub->add_option("--out", args.out, "Prediction JSONL path")->required();
    sub->add_option("--mode", args.mode, "prob | sim | ensemble")->capture_default_str();
    sub->add_option("--threshold", args.threshold, "Decision threshold")->capture_default_str();
    sub->add_flag("--sweep", args.sweep, "Pick the threshold on --dev by macro F1");
    sub->add_option("--dev", args.dev, "Dev corpus for --sweep");
    sub->add_option("--threads", args.threads, "Worker threads")->capture_default_str();
    sub->callback([&args, sub] {
        print_resolved_config(sub);
        const Checkpoint ckpt = load_checkpoint(args.model);
        const PredictMode mode = predict_mode_from_string(args.mode);
        const auto docs = load_jsonl(args.corpus);

        double threshold = args.threshold;
        if (args.sweep) {
            if (args.dev.empty()) {
                throw std::invalid_argument("--sweep requires --dev");
            }
            const auto dev_docs = load_jsonl(args.dev);
            std::vector<BoundaryLabels> refs(dev_docs.size());
            std::vector<Vec> scores(dev_docs.size());
            std::vector<std::vector<bool>> masks(dev_docs.size());
            bool any_flags = false;
            parallel_docs(dev_docs.size(), args.threads, [&](std::size_t i) {
                refs[i] = boundary_labels(dev_docs[i]);
                const Prediction p =
                    predict_document(dev_docs[i], ckpt.params, ckpt.config, mode,
                                     mode == PredictMode::kSim ? 0.0 : 0.5);
                scores[i] = mode == PredictMode::kProb
                                ? p.probs
                                : (mode == PredictMode::kSim
                                       ? *p.sims
                                       : ensemble_scores(p.probs, *p.sims));
                masks[i] = candidate_mask(dev_docs[i]);
            });
            for (const auto& d : dev_docs) any_flags = any_flags || has_candidate_flags(d);
            threshold = sweep_threshold(refs, scores, mode, any_flags ? &masks : nullptr);
            std::cerr << "sweep selected threshold " << threshold << "\n";
        }

        std::vector<Prediction> preds(docs.size());
        parallel_docs(docs.size(), args.threads, [&](std::size_t i) {
            preds[i] = predict_document(docs[i], ckpt.params, ckpt.config, mode, threshold);
        });
        save_predictions(preds, args.out);
        std::cerr << "wrote " << preds.size() << " predictions to " << args.out << "\n";
    });
}

struct EvalArgs {
    std::string ref;
    std::string pred;
    std::string out;
    bool micro = false;
    bool no_candidate_filter = false;
    int threads = 1;
};

void add_eval(CLI::App& app, EvalArgs& args) {
    CLI::App* sub = app.add_subcommand("eval", "Score predictions against a gold corpus");
    sub->configurable()->fallthrough();
    sub->add_option("--ref", args.ref, "Gold corpus JSONL")->required();
    sub->add_option("--pred", args.pred, "Prediction JSONL")->required();
    sub->add_option("--out", args.out, "Report JSON path (stdout always gets the report)");
    sub->add_flag("--micro", args.micro, "Pool counts across documents instead of macro");
    sub->add_flag("--no-candidate-filter", args.no_candidate_filter,
                  "Score all positions even when candidate flags are present");
    sub->add_option("--threads", args.threads, "Worker threads")->capture_default_str();
    sub->callback([&args, sub] {
        print_resolved_config(sub);
        const auto gold = load_jsonl(args.ref);
        const auto preds = load_predictions(args.pred);
        std::map<std::string, const Prediction*> by_id;
        for (const auto& p : preds) by_id[p.doc_id] = &p;

        std::vector<std::string> ids(gold.size());
        std::vector<BoundaryLabels> refs(gold.size()), hyps(gold.size());
        std::vector<std::vector<bool>> masks(gold.size());
        bool any_flags = false;
        for (const auto& doc : gold) any_flags = any_flags || has_candidate_flags(doc);
        parallel_docs(gold.size(), args.threads, [&](std::size_t i) {
            const Document& doc = gold[i];
            const auto it = by_id.find(doc.doc_id);
            if (it == by_id.end()) {
                throw std::runtime_error("no prediction for document '" + doc.doc_id + "'");
            }
            if (it->second->labels.size() != doc.size() - 1) {
                throw std::runtime_error("prediction length mismatch for document '" +
                                         doc.doc_id + "'");
            }
            ids[i] = doc.doc_id;
            refs[i] = boundary_labels(doc);
            hyps[i] = it->second->labels;
            masks[i] = candidate_mask(doc);
        });
        const bool use_masks = any_flags && !args.no_candidate_filter;
        const CorpusMetrics cm = evaluate_corpus(ids, refs, hyps, use_masks ? &masks : nullptr);

        const MetricReport& head = args.micro ? cm.micro : cm.macro;
        json report{{"f1", head.f1},
                    {"precision", head.precision},
                    {"recall", head.recall},
                    {"pk", head.pk},
                    {"wd", head.wd},
                    {"window_k", cm.mean_window_k},
                    {"n_docs", cm.n_docs},
                    {"aggregation", args.micro ? "micro" : "macro"}};
        json per_doc = json::array();
        for (std::size_t i = 0; i < cm.per_doc.size(); ++i) {
            const MetricReport& r = cm.per_doc[i];
            per_doc.push_back({{"doc_id", cm.doc_ids[i]},
                               {"f1", r.f1},
                               {"precision", r.precision},
                               {"recall", r.recall},
                               {"pk", r.pk},
                               {"wd", r.wd},
                               {"window_k", r.window_k}});
        }
        report["per_doc"] = std::move(per_doc);
        std::cout << report.dump(2) << "\n";
        if (!args.out.empty()) {
            std::ofstream out(args.out, std::ios::binary);
            if (!out) throw std::runtime_error("cannot write " + args.out);
            out << report.dump(2) << '\n';
        }
    });
}

struct GradcheckArgs {
    std::uint64_t seed = 1;
    int trials = 25;
};

// Random-instance gradient verification across every loss and the end-to-end
// model; exits nonzero if any check lands above tolerance.
void add_gradcheck(CLI::App& app, GradcheckArgs& args) {
    CLI::App* sub = app.add_subcommand("gradcheck", "Finite-difference gradient verification");
    sub->configurable()->fallthrough();
    sub->add_option("--seed", args.seed)->capture_default_str();
    sub->add_option("--trials", args.trials)->capture_default_str();
    sub->callback([&args, sub] {
        print_resolved_config(sub);
        if (args.trials < 1) throw std::invalid_argument("trials must be >= 1");
        RngStream rng(args.seed);

        double worst_ts = 0.0, worst_tssp = 0.0, worst_cssl = 0.0, worst_model = 0.0;
        for (int trial = 0; trial < args.trials; ++trial) {
            {  // binary cross entropy
                const std::size_t n = 1 + rng.next_below(6);
                Vec p(n);
                BoundaryLabels y(n);
                for (std::size_t i = 0; i < n; ++i) {
                    p[i] = 0.05 + 0.9 * rng.next_double();
                    y[i] = rng.next_bernoulli(0.5) ? 1 : 0;
                }
                const TsLoss l = loss_ts(p, y);
                worst_ts = std::max(worst_ts,
                                    finite_diff_check([&](const Vec& x) { return loss_ts(x, y).value; },
                                                      p, l.grad_probs, 1e-5));
            }
            {  // 3-class cross entropy through the true-class coordinate
                const std::size_t n = 1 + rng.next_below(5);
                Vec pt(n);
                std::vector<int> labels(n);
                for (std::size_t i = 0; i < n; ++i) {
                    pt[i] = 0.1 + 0.8 * rng.next_double();
                    labels[i] = static_cast<int>(rng.next_below(3));
                }
                auto rows_of = [&](const Vec& x) {
                    std::vector<std::array<double, 3>> rows(n);
                    for (std::size_t i = 0; i < n; ++i) {
                        const double rest = (1.0 - x[i]) / 2.0;
                        rows[i] = {rest, rest, rest};
                        rows[i][static_cast<std::size_t>(labels[i])] = x[i];
                    }
                    return rows;
                };
                const TsspLoss l = loss_tssp(rows_of(pt), labels);
                Vec analytic(n);
                for (std::size_t i = 0; i < n; ++i) {
                    analytic[i] = l.grad_rows[i][static_cast<std::size_t>(labels[i])];
                }
                worst_tssp = std::max(
                    worst_tssp,
                    finite_diff_check(
                        [&](const Vec& x) { return loss_tssp(rows_of(x), labels).value; }, pt,
                        analytic, 1e-5));
            }
            {  // contrastive loss over representations
                const std::size_t n = 3 + rng.next_below(8);
                const std::size_t d = 2 + rng.next_below(6);
                std::vector<int> sizes;
                std::size_t left = n;
                while (left > 0) {
                    const std::size_t s = 1 + rng.next_below(std::min<std::size_t>(left, 3));
                    sizes.push_back(static_cast<int>(s));
                    left -= s;
                }
                Document doc;
                doc.doc_id = "gradcheck";
                std::size_t idx = 0;
                for (std::size_t t = 0; t < sizes.size(); ++t) {
                    for (int s = 0; s < sizes[t]; ++s) {
                        Sentence sent;
                        sent.index = idx++;
                        sent.tokens = {"t" + std::to_string(idx)};
                        doc.sentences.push_back(std::move(sent));
                        doc.topic_of.push_back(static_cast<int>(t));
                    }
                }
                CsslConfig ccfg;
                ccfg.k1 = 1 + static_cast<int>(rng.next_below(2));
                ccfg.k2 = static_cast<int>(rng.next_below(3));
                const auto sets = build_pairs(doc, ccfg);
                Vec flat(n * d);
                for (double& x : flat) {
                    x = 2.0 * rng.next_double() - 1.0;
                    if (std::abs(x) < 0.05) x = 0.1;
                }
                auto reps_of = [&](const Vec& x) {
                    std::vector<Vec> reps(n, Vec(d));
                    for (std::size_t i = 0; i < n; ++i) {
                        for (std::size_t k = 0; k < d; ++k) reps[i][k] = x[i * d + k];
                    }
                    return reps;
                };
                const CsslLoss l = loss_cssl(reps_of(flat), sets, ccfg.tau);
                Vec analytic(n * d);
                for (std::size_t i = 0; i < n; ++i) {
                    for (std::size_t k = 0; k < d; ++k) analytic[i * d + k] = l.grad_reps[i][k];
                }
                worst_cssl = std::max(
                    worst_cssl,
                    finite_diff_check(
                        [&](const Vec& x) { return loss_cssl(reps_of(x), sets, ccfg.tau).value; },
                        flat, analytic, 1e-5));
            }
            {  // end-to-end model
                TrainConfig cfg;
                cfg.feature_dim = 16;
                cfg.rep_dim = 4;
                cfg.max_sentences = 8;
                cfg.seed = mix_seed(args.seed, static_cast<std::uint64_t>(trial));

                auto mini_doc = [&rng](const std::string& id) {
                    Document doc;
                    doc.doc_id = id;
                    const int topics = 1 + static_cast<int>(rng.next_below(2));
                    std::size_t idx = 0;
                    for (int t = 0; t < topics; ++t) {
                        const int len = 1 + static_cast<int>(rng.next_below(3));
                        for (int s = 0; s < len; ++s) {
                            Sentence sent;
                            sent.index = idx++;
                            sent.tokens = {id + std::to_string(idx), "w" + std::to_string(t)};
                            doc.sentences.push_back(std::move(sent));
                            doc.topic_of.push_back(t);
                        }
                    }
                    return doc;
                };
                std::vector<Document> pool = {mini_doc("gc-a"), mini_doc("gc-b")};
                if (pool[0].size() < 2) continue;
                AugmentConfig ac;
                ac.seed = cfg.seed;
                const AugmentedDocument aug = augment_document(pool[0], pool, ac);
                const auto sets = build_pairs(pool[0], cfg.cssl);
                const ModelParams params = init_params(cfg);
                const DocLoss dl = document_loss(pool[0], &aug, &sets, params, cfg);
                ModelParams probe = params;
                worst_model = std::max(
                    worst_model,
                    finite_diff_check(
                        [&](const Vec& x) {
                            unflatten_params(x, probe);
                            return document_loss(pool[0], &aug, &sets, probe, cfg).report.l_total;
                        },
                        flatten_params(params), flatten_params(dl.grads), 1e-5));
            }
        }

        const bool ok = worst_ts < 1e-4 && worst_tssp < 1e-4 && worst_cssl < 1e-4 &&
                        worst_model < 1e-3;
        std::cout << "gradcheck seed=" << args.seed << " trials=" << args.trials << "\n"
                  << "  loss_ts    max rel err " << worst_ts << "  (tol 1e-4)\n"
                  << "  loss_tssp  max rel err " << worst_tssp << "  (tol 1e-4)\n"
                  << "  loss_cssl  max rel err " << worst_cssl << "  (tol 1e-4)\n"
                  << "  end-to-end max rel err " << worst_model << "  (tol 1e-3)\n"
                  << (ok ? "OK" : "FAILED") << "\n";
        if (!ok) throw std::invalid_argument("gradient check failed");
    });
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"topic segmentation toolkit with coherence auxiliary objectives"};
    app.require_subcommand(1);
    app.set_config("--config", "", "Read options from an INI/TOML file (sections per subcommand)");

    SynthArgs synth_args;
    AugmentArgs augment_args;
    PairsArgs pairs_args;
    TrainArgs train_args;
    SegmentArgs segment_args;
    EvalArgs eval_args;
    GradcheckArgs gradcheck_args;

    add_synth(app, synth_args);
    add_augment(app, augment_args);
    add_pairs(app, pairs_args);
    add_train(app, train_args);
    add_segment(app, segment_args);
    add_eval(app, eval_args);
    add_gradcheck(app, gradcheck_args);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
