#include "topseg/infer.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include "json.hpp"
#include "topseg/metrics.hpp"

namespace topseg {

using nlohmann::json;

PredictMode predict_mode_from_string(const std::string& s) {
    if (s == "prob") return PredictMode::kProb;
    if (s == "sim") return PredictMode::kSim;
    if (s == "ensemble") return PredictMode::kEnsemble;
    throw std::invalid_argument("unknown prediction mode: " + s);
}

std::string to_string(PredictMode mode) {
    switch (mode) {
        case PredictMode::kProb: return "prob";
        case PredictMode::kSim: return "sim";
        case PredictMode::kEnsemble: return "ensemble";
    }
    return "prob";
}

BoundaryLabels predict_by_prob(const Vec& probs, double threshold,
                               const std::vector<bool>* candidate_mask) {
    if (!(threshold >= 0.0 && threshold <= 1.0)) {
        throw std::invalid_argument("threshold must be in [0,1] for prob mode");
    }
    if (candidate_mask && candidate_mask->size() != probs.size()) {
        throw std::invalid_argument("candidate mask length mismatch");
    }
    BoundaryLabels labels(probs.size(), 0);
    for (std::size_t i = 0; i < probs.size(); ++i) {
        const bool allowed = !candidate_mask || (*candidate_mask)[i];
        labels[i] = (allowed && probs[i] >= threshold) ? 1 : 0;
    }
    return labels;
}

Vec adjacent_cosines(const std::vector<SentenceRep>& reps) {
    Vec sims;
    if (reps.size() < 2) return sims;
    sims.reserve(reps.size() - 1);
    for (std::size_t i = 0; i + 1 < reps.size(); ++i) {
        sims.push_back(scaled_cosine(reps[i], reps[i + 1], 1.0));  // tau = 1: plain cosine
    }
    return sims;
}

BoundaryLabels predict_by_sim(const std::vector<SentenceRep>& reps, double threshold,
                              const std::vector<bool>* candidate_mask) {
    const Vec sims = adjacent_cosines(reps);
    if (candidate_mask && candidate_mask->size() != sims.size()) {
        throw std::invalid_argument("candidate mask length mismatch");
    }
    BoundaryLabels labels(sims.size(), 0);
    for (std::size_t i = 0; i < sims.size(); ++i) {
        const bool allowed = !candidate_mask || (*candidate_mask)[i];
        labels[i] = (allowed && sims[i] < threshold) ? 1 : 0;
    }
    return labels;
}

double ensemble_score(double prob, double sim) {
    return 0.5 * (prob + 1.0 / (1.0 + std::exp(sim)));
}

Vec ensemble_scores(const Vec& probs, const Vec& sims) {
    if (probs.size() != sims.size()) {
        throw std::invalid_argument("ensemble: probs and sims length mismatch");
    }
    Vec scores(probs.size());
    for (std::size_t i = 0; i < probs.size(); ++i) {
        scores[i] = ensemble_score(probs[i], sims[i]);
    }
    return scores;
}

std::vector<double> threshold_grid() {
    std::vector<double> grid;
    grid.reserve(21);
    for (int i = 0; i <= 20; ++i) grid.push_back(static_cast<double>(i) * 0.05);
    return grid;
}

double sweep_threshold(const std::vector<BoundaryLabels>& refs,
                       const std::vector<Vec>& scores, PredictMode mode,
                       const std::vector<std::vector<bool>>* candidate_masks) {
    if (refs.empty() || refs.size() != scores.size()) {
        throw std::invalid_argument("sweep_threshold: need matching non-empty refs and scores");
    }
    double best_threshold = 0.0;
    double best_f1 = -1.0;
    for (double t : threshold_grid()) {
        double sum_f1 = 0.0;
        for (std::size_t d = 0; d < refs.size(); ++d) {
            const std::vector<bool>* mask = candidate_masks ? &(*candidate_masks)[d] : nullptr;
            BoundaryLabels hyp(scores[d].size(), 0);
            for (std::size_t i = 0; i < scores[d].size(); ++i) {
                const bool allowed = !mask || (*mask)[i];
                const bool fire =
                    mode == PredictMode::kSim ? scores[d][i] < t : scores[d][i] >= t;
                hyp[i] = (allowed && fire) ? 1 : 0;
            }
            double p, r, f1;
            prf(refs[d], hyp, p, r, f1, mask);
            sum_f1 += f1;
        }
        const double macro_f1 = sum_f1 / static_cast<double>(refs.size());
        if (macro_f1 > best_f1) {  // strict: ties keep the smaller threshold
            best_f1 = macro_f1;
            best_threshold = t;
        }
    }
    return best_threshold;
}

Prediction merge_window_predictions(const std::vector<Prediction>& windows, const Document& doc) {
    validate_document(doc);
    if (windows.empty()) throw std::invalid_argument("merge: no windows given");
    Prediction merged;
    merged.doc_id = doc.doc_id;
    merged.threshold_used = windows.front().threshold_used;
    bool all_sims = true;
    for (const auto& w : windows) {
        if (w.doc_id != doc.doc_id) {
            throw std::invalid_argument("merge: window doc_id '" + w.doc_id +
                                        "' does not match document '" + doc.doc_id + "'");
        }
        if (w.probs.size() != w.labels.size()) {
            throw std::invalid_argument("merge: window probs/labels length mismatch");
        }
        merged.probs.insert(merged.probs.end(), w.probs.begin(), w.probs.end());
        merged.labels.insert(merged.labels.end(), w.labels.begin(), w.labels.end());
        all_sims = all_sims && w.sims.has_value();
    }
    if (merged.labels.size() != doc.size() - 1) {
        throw std::invalid_argument("merge: windows do not tile document '" + doc.doc_id + "'");
    }
    if (all_sims) {
        Vec sims;
        for (const auto& w : windows) {
            sims.insert(sims.end(), w.sims->begin(), w.sims->end());
        }
        merged.sims = std::move(sims);
    }
    return merged;
}

Prediction predict_document(const Document& doc, const ModelParams& params,
                            const TrainConfig& cfg, PredictMode mode, double threshold) {
    validate_document(doc);
    if (mode == PredictMode::kSim) {
        if (!(threshold >= -1.0 && threshold <= 1.0)) {
            throw std::invalid_argument("threshold must be in [-1,1] for sim mode");
        }
    } else if (!(threshold >= 0.0 && threshold <= 1.0)) {
        throw std::invalid_argument("threshold must be in [0,1] for " + to_string(mode) + " mode");
    }

    Prediction pred;
    pred.doc_id = doc.doc_id;
    pred.threshold_used = threshold;
    pred.probs = document_probabilities(doc, params, cfg);
    const std::vector<SentenceRep> reps = document_reps(doc, params, cfg);
    pred.sims = adjacent_cosines(reps);
    const std::vector<bool> mask = candidate_mask(doc);
    const std::vector<bool>* mask_ptr = has_candidate_flags(doc) ? &mask : nullptr;

    switch (mode) {
        case PredictMode::kProb:
            pred.labels = predict_by_prob(pred.probs, threshold, mask_ptr);
            break;
        case PredictMode::kSim: {
            const Vec& sims = *pred.sims;
            pred.labels.assign(sims.size(), 0);
            for (std::size_t i = 0; i < sims.size(); ++i) {
                const bool allowed = !mask_ptr || (*mask_ptr)[i];
                pred.labels[i] = (allowed && sims[i] < threshold) ? 1 : 0;
            }
            break;
        }
        case PredictMode::kEnsemble: {
            const Vec scores = ensemble_scores(pred.probs, *pred.sims);
            pred.labels = predict_by_prob(scores, threshold, mask_ptr);
            break;
        }
    }
    return pred;
}

std::string prediction_to_json_line(const Prediction& pred) {
    json rec;
    rec["doc_id"] = pred.doc_id;
    rec["probs"] = pred.probs;
    if (pred.sims) rec["sims"] = *pred.sims;
    rec["labels"] = pred.labels;
    rec["threshold"] = pred.threshold_used;
    return rec.dump();
}

Prediction prediction_from_json_line(const std::string& line) {
    const json rec = json::parse(line);
    Prediction pred;
    pred.doc_id = rec.at("doc_id").get<std::string>();
    pred.probs = rec.at("probs").get<Vec>();
    if (rec.contains("sims")) pred.sims = rec["sims"].get<Vec>();
    pred.labels = rec.at("labels").get<BoundaryLabels>();
    pred.threshold_used = rec.at("threshold").get<double>();
    return pred;
}

std::vector<Prediction> load_predictions(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open prediction file: " + path);
    std::vector<Prediction> preds;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        try {
            preds.push_back(prediction_from_json_line(line));
        } catch (const json::exception& e) {
            throw std::invalid_argument("malformed prediction line " + std::to_string(lineno) +
                                        ": " + e.what());
        }
    }
    return preds;
}

void save_predictions(const std::vector<Prediction>& preds, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write prediction file: " + path);
    for (const auto& p : preds) out << prediction_to_json_line(p) << '\n';
    if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace topseg
