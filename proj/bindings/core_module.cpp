#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "topseg/augment.hpp"
#include "topseg/corpus.hpp"
#include "topseg/infer.hpp"
#include "topseg/losses.hpp"
#include "topseg/metrics.hpp"
#include "topseg/model.hpp"
#include "topseg/pairs.hpp"

namespace py = pybind11;
using namespace topseg;

PYBIND11_MODULE(_core, m) {
    m.doc() = "Topic segmentation toolkit: corpus handling, coherence-based "
              "augmentation, contrastive pairs, losses, a trainable segmenter, "
              "metrics, and inference.";

    // ----- corpus -----
    py::class_<Sentence>(m, "Sentence")
        .def(py::init<>())
        .def_readwrite("index", &Sentence::index)
        .def_readwrite("tokens", &Sentence::tokens)
        .def_readwrite("text", &Sentence::text)
        .def_readwrite("candidate", &Sentence::candidate)
        .def_readwrite("has_candidate_flag", &Sentence::has_candidate_flag);

    py::class_<Document>(m, "Document")
        .def(py::init<>())
        .def_readwrite("doc_id", &Document::doc_id)
        .def_readwrite("sentences", &Document::sentences)
        .def_readwrite("topic_of", &Document::topic_of)
        .def("__len__", &Document::size)
        .def("__repr__", [](const Document& d) {
            return "<Document '" + d.doc_id + "' with " + std::to_string(d.size()) +
                   " sentences>";
        });

    py::class_<IntRange>(m, "IntRange")
        .def(py::init<>())
        .def(py::init([](int lo, int hi) { return IntRange{lo, hi}; }))
        .def_readwrite("lo", &IntRange::lo)
        .def_readwrite("hi", &IntRange::hi);

    py::class_<SynthConfig>(m, "SynthConfig")
        .def(py::init<>())
        .def_readwrite("n_docs", &SynthConfig::n_docs)
        .def_readwrite("vocab_clusters", &SynthConfig::vocab_clusters)
        .def_readwrite("cluster_vocab_size", &SynthConfig::cluster_vocab_size)
        .def_readwrite("topics_per_doc", &SynthConfig::topics_per_doc)
        .def_readwrite("sentences_per_topic", &SynthConfig::sentences_per_topic)
        .def_readwrite("tokens_per_sentence", &SynthConfig::tokens_per_sentence)
        .def_readwrite("noise_rate", &SynthConfig::noise_rate)
        .def_readwrite("seed", &SynthConfig::seed);

    m.def("validate_document", &validate_document, py::arg("doc"));
    m.def("boundary_labels", &boundary_labels, py::arg("doc"),
          "n-1 labels; 1 where the sentence is the last of its topic");
    m.def("load_jsonl", &load_jsonl, py::arg("path"));
    m.def("save_jsonl", &save_jsonl, py::arg("docs"), py::arg("path"));
    m.def("sliding_windows", &sliding_windows, py::arg("doc"), py::arg("max_sentences"));
    m.def("synth_corpus", &synth_corpus, py::arg("config"));

    // ----- augment -----
    py::class_<Provenance>(m, "Provenance")
        .def(py::init<>())
        .def_readwrite("src_doc_id", &Provenance::src_doc_id)
        .def_readwrite("src_topic_id", &Provenance::src_topic_id)
        .def_readwrite("src_sentence_index", &Provenance::src_sentence_index);

    py::class_<AugmentConfig>(m, "AugmentConfig")
        .def(py::init<>())
        .def_readwrite("p1", &AugmentConfig::p1)
        .def_readwrite("p2", &AugmentConfig::p2)
        .def_readwrite("shuffle_topics", &AugmentConfig::shuffle_topics)
        .def_readwrite("shuffle_sentences", &AugmentConfig::shuffle_sentences)
        .def_readwrite("seed", &AugmentConfig::seed);

    py::class_<AugmentedDocument>(m, "AugmentedDocument")
        .def(py::init<>())
        .def_readwrite("doc_id", &AugmentedDocument::doc_id)
        .def_readwrite("sentences", &AugmentedDocument::sentences)
        .def_readwrite("provenance", &AugmentedDocument::provenance)
        .def_readwrite("tssp_labels", &AugmentedDocument::tssp_labels);

    m.def("augment_document", &augment_document, py::arg("doc"), py::arg("pool"),
          py::arg("config"),
          "Shuffle topics, replace topics from the pool, shuffle within topics, "
          "and label each adjacent pair 0/1/2 from provenance.");

    // ----- pairs -----
    py::class_<CsslConfig>(m, "CsslConfig")
        .def(py::init<>())
        .def_readwrite("k1", &CsslConfig::k1)
        .def_readwrite("k2", &CsslConfig::k2)
        .def_readwrite("tau", &CsslConfig::tau);

    py::class_<PairSet>(m, "PairSet")
        .def(py::init<>())
        .def_readwrite("anchor", &PairSet::anchor)
        .def_readwrite("positives", &PairSet::positives)
        .def_readwrite("negatives", &PairSet::negatives)
        .def_readwrite("excluded", &PairSet::excluded);

    m.def("build_pairs", &build_pairs, py::arg("doc"), py::arg("config"));

    // ----- losses -----
    m.def(
        "loss_ts",
        [](const Vec& probs, const BoundaryLabels& labels) {
            const TsLoss l = loss_ts(probs, labels);
            return py::make_tuple(l.value, l.grad_probs);
        },
        py::arg("probs"), py::arg("labels"),
        "Binary cross entropy over boundary probabilities; returns (value, grad).");
    m.def(
        "loss_tssp",
        [](const std::vector<std::array<double, 3>>& rows, const std::vector<int>& labels) {
            const TsspLoss l = loss_tssp(rows, labels);
            return py::make_tuple(l.value, l.grad_rows);
        },
        py::arg("rows"), py::arg("labels"),
        "3-class cross entropy over adjacent-pair rows; returns (value, grad_rows).");
    m.def("scaled_cosine", &scaled_cosine, py::arg("x1"), py::arg("x2"), py::arg("tau"));
    m.def(
        "loss_cssl",
        [](const std::vector<Vec>& reps, const std::vector<PairSet>& sets, double tau,
           bool mean_over_anchors) {
            const CsslLoss l = loss_cssl(reps, sets, tau, mean_over_anchors);
            return py::make_tuple(l.value, l.grad_reps);
        },
        py::arg("reps"), py::arg("pairsets"), py::arg("tau"),
        py::arg("mean_over_anchors") = false,
        "Contrastive loss over representations; returns (value, grad_reps).");
    m.def("loss_total", &loss_total, py::arg("l_ts"), py::arg("l_tssp"), py::arg("l_cssl"),
          py::arg("alpha1"), py::arg("alpha2"));

    // ----- model -----
    py::class_<ModelParams>(m, "ModelParams")
        .def(py::init<>())
        .def_property_readonly("feature_dim", &ModelParams::feature_dim)
        .def_property_readonly("rep_dim", &ModelParams::rep_dim);

    py::class_<TrainConfig>(m, "TrainConfig")
        .def(py::init<>())
        .def_readwrite("lr", &TrainConfig::lr)
        .def_readwrite("weight_decay", &TrainConfig::weight_decay)
        .def_readwrite("beta1", &TrainConfig::beta1)
        .def_readwrite("beta2", &TrainConfig::beta2)
        .def_readwrite("eps_opt", &TrainConfig::eps_opt)
        .def_readwrite("epochs", &TrainConfig::epochs)
        .def_readwrite("batch_docs", &TrainConfig::batch_docs)
        .def_readwrite("alpha1", &TrainConfig::alpha1)
        .def_readwrite("alpha2", &TrainConfig::alpha2)
        .def_readwrite("cssl", &TrainConfig::cssl)
        .def_readwrite("augment", &TrainConfig::augment)
        .def_readwrite("max_sentences", &TrainConfig::max_sentences)
        .def_readwrite("seed", &TrainConfig::seed)
        .def_readwrite("feature_dim", &TrainConfig::feature_dim)
        .def_readwrite("rep_dim", &TrainConfig::rep_dim)
        .def_readwrite("context_window", &TrainConfig::context_window);

    py::class_<MetricReport>(m, "MetricReport")
        .def(py::init<>())
        .def_readwrite("f1", &MetricReport::f1)
        .def_readwrite("precision", &MetricReport::precision)
        .def_readwrite("recall", &MetricReport::recall)
        .def_readwrite("pk", &MetricReport::pk)
        .def_readwrite("wd", &MetricReport::wd)
        .def_readwrite("window_k", &MetricReport::window_k)
        .def("__repr__", [](const MetricReport& r) {
            return "<MetricReport f1=" + std::to_string(r.f1) + " pk=" + std::to_string(r.pk) +
                   " wd=" + std::to_string(r.wd) + ">";
        });

    py::class_<EpochLog>(m, "EpochLog")
        .def_readonly("epoch", &EpochLog::epoch)
        .def_readonly("mean_l_ts", &EpochLog::mean_l_ts)
        .def_readonly("mean_l_tssp", &EpochLog::mean_l_tssp)
        .def_readonly("mean_l_cssl", &EpochLog::mean_l_cssl)
        .def_readonly("mean_l_total", &EpochLog::mean_l_total)
        .def_readonly("has_dev", &EpochLog::has_dev)
        .def_readonly("dev", &EpochLog::dev);

    py::class_<TrainResult>(m, "TrainResult")
        .def_readonly("params", &TrainResult::params)
        .def_readonly("config", &TrainResult::config)
        .def_readonly("log", &TrainResult::log)
        .def_readonly("n_short_excluded", &TrainResult::n_short_excluded);

    py::class_<Checkpoint>(m, "Checkpoint")
        .def_readonly("params", &Checkpoint::params)
        .def_readonly("config", &Checkpoint::config);

    m.def("featurize", &featurize, py::arg("sentence"), py::arg("feature_dim"),
          "Hashed bag-of-tokens, L2-normalized.");
    m.def("encode", &encode, py::arg("features"), py::arg("params"), py::arg("window"));
    m.def("seg_probs", &seg_probs, py::arg("reps"), py::arg("params"));
    m.def("tssp_probs", &tssp_probs, py::arg("reps"), py::arg("params"));
    m.def(
        "train",
        [](const std::vector<Document>& corpus, const TrainConfig& cfg,
           const std::optional<std::vector<Document>>& dev) {
            return train(corpus, cfg, dev ? &*dev : nullptr);
        },
        py::arg("corpus"), py::arg("config"), py::arg("dev") = py::none(),
        py::call_guard<py::gil_scoped_release>());
    m.def("evaluate_dev", &evaluate_dev, py::arg("dev"), py::arg("params"), py::arg("config"));
    m.def("save_checkpoint", &save_checkpoint, py::arg("params"), py::arg("config"),
          py::arg("path"));
    m.def("load_checkpoint", &load_checkpoint, py::arg("path"));
    m.def("document_probabilities", &document_probabilities, py::arg("doc"), py::arg("params"),
          py::arg("config"));
    m.def("init_params", &init_params, py::arg("config"));

    // ----- metrics -----
    m.def(
        "prf",
        [](const BoundaryLabels& ref, const BoundaryLabels& hyp,
           const std::optional<std::vector<bool>>& mask) {
            double p, r, f1;
            prf(ref, hyp, p, r, f1, mask ? &*mask : nullptr);
            return py::make_tuple(p, r, f1);
        },
        py::arg("ref"), py::arg("hyp"), py::arg("candidate_mask") = py::none(),
        "Returns (precision, recall, f1) on the boundary class.");
    m.def("default_window", &default_window, py::arg("ref"));
    m.def("pk", &pk, py::arg("ref"), py::arg("hyp"), py::arg("k"));
    m.def("window_diff", &window_diff, py::arg("ref"), py::arg("hyp"), py::arg("k"));

    py::class_<CorpusMetrics>(m, "CorpusMetrics")
        .def_readonly("macro", &CorpusMetrics::macro)
        .def_readonly("micro", &CorpusMetrics::micro)
        .def_readonly("mean_window_k", &CorpusMetrics::mean_window_k)
        .def_readonly("n_docs", &CorpusMetrics::n_docs)
        .def_readonly("per_doc", &CorpusMetrics::per_doc)
        .def_readonly("doc_ids", &CorpusMetrics::doc_ids);

    m.def(
        "evaluate_corpus",
        [](const std::vector<std::string>& ids, const std::vector<BoundaryLabels>& refs,
           const std::vector<BoundaryLabels>& hyps,
           const std::optional<std::vector<std::vector<bool>>>& masks) {
            return evaluate_corpus(ids, refs, hyps, masks ? &*masks : nullptr);
        },
        py::arg("doc_ids"), py::arg("refs"), py::arg("hyps"),
        py::arg("candidate_masks") = py::none());

    // ----- infer -----
    py::class_<Prediction>(m, "Prediction")
        .def(py::init<>())
        .def_readwrite("doc_id", &Prediction::doc_id)
        .def_readwrite("probs", &Prediction::probs)
        .def_readwrite("sims", &Prediction::sims)
        .def_readwrite("labels", &Prediction::labels)
        .def_readwrite("threshold_used", &Prediction::threshold_used);

    m.def(
        "predict_by_prob",
        [](const Vec& probs, double threshold, const std::optional<std::vector<bool>>& mask) {
            return predict_by_prob(probs, threshold, mask ? &*mask : nullptr);
        },
        py::arg("probs"), py::arg("threshold"), py::arg("candidate_mask") = py::none());
    m.def(
        "predict_by_sim",
        [](const std::vector<SentenceRep>& reps, double threshold,
           const std::optional<std::vector<bool>>& mask) {
            return predict_by_sim(reps, threshold, mask ? &*mask : nullptr);
        },
        py::arg("reps"), py::arg("threshold"), py::arg("candidate_mask") = py::none());
    m.def("adjacent_cosines", &adjacent_cosines, py::arg("reps"));
    m.def("ensemble_score", &ensemble_score, py::arg("prob"), py::arg("sim"),
          "0.5 * (prob + sigmoid(-sim))");
    m.def("threshold_grid", &threshold_grid);
    m.def(
        "sweep_threshold",
        [](const std::vector<BoundaryLabels>& refs, const std::vector<Vec>& scores,
           const std::string& mode, const std::optional<std::vector<std::vector<bool>>>& masks) {
            return sweep_threshold(refs, scores, predict_mode_from_string(mode),
                                   masks ? &*masks : nullptr);
        },
        py::arg("refs"), py::arg("scores"), py::arg("mode") = "prob",
        py::arg("candidate_masks") = py::none());
    m.def("merge_window_predictions", &merge_window_predictions, py::arg("windows"),
          py::arg("doc"));
    m.def(
        "predict_document",
        [](const Document& doc, const ModelParams& params, const TrainConfig& cfg,
           const std::string& mode, double threshold) {
            return predict_document(doc, params, cfg, predict_mode_from_string(mode), threshold);
        },
        py::arg("doc"), py::arg("params"), py::arg("config"), py::arg("mode") = "prob",
        py::arg("threshold") = 0.5);
    m.def("load_predictions", &load_predictions, py::arg("path"));
    m.def("save_predictions", &save_predictions, py::arg("preds"), py::arg("path"));

    m.attr("__version__") = "0.1.0";
}
