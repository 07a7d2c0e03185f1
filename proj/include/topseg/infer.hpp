#pragma once

#include <optional>
#include <string>
#include <vector>

#include "topseg/corpus.hpp"
#include "topseg/losses.hpp"
#include "topseg/model.hpp"

namespace topseg {

enum class PredictMode { kProb, kSim, kEnsemble };

PredictMode predict_mode_from_string(const std::string& s);
std::string to_string(PredictMode mode);

struct Prediction {
    std::string doc_id;
    Vec probs;                // n-1 boundary probabilities
    std::optional<Vec> sims;  // n-1 unscaled cosines of adjacent representations
    BoundaryLabels labels;
    double threshold_used = 0.5;
};

/// Boundary where prob >= threshold; positions masked out by the candidate
/// flag are forced to 0.
BoundaryLabels predict_by_prob(const Vec& probs, double threshold,
                               const std::vector<bool>* candidate_mask = nullptr);

/// Unscaled cosine of each adjacent representation pair.
Vec adjacent_cosines(const std::vector<SentenceRep>& reps);

/// Boundary where the adjacent cosine drops below the threshold (low
/// similarity reads as a topic shift).
BoundaryLabels predict_by_sim(const std::vector<SentenceRep>& reps, double threshold,
                              const std::vector<bool>* candidate_mask = nullptr);

/// 0.5 * (prob + sigmoid(-sim)).
double ensemble_score(double prob, double sim);
Vec ensemble_scores(const Vec& probs, const Vec& sims);

/// The 21 thresholds 0.00, 0.05, ..., 1.00.
std::vector<double> threshold_grid();

/// Best threshold on a dev corpus by macro F1; ties go to the smaller value.
/// `scores` is per-document: probabilities, cosines, or ensemble scores
/// depending on mode (sim mode treats scores below the threshold as
/// boundaries, the others at-or-above).
double sweep_threshold(const std::vector<BoundaryLabels>& refs,
                       const std::vector<Vec>& scores, PredictMode mode,
                       const std::vector<std::vector<bool>>* candidate_masks = nullptr);

/// Stitches per-window predictions back into one document-length prediction.
/// Each window owns the boundary positions of its non-final sentences, so the
/// merged vectors are the window vectors concatenated.
Prediction merge_window_predictions(const std::vector<Prediction>& windows, const Document& doc);

/// End-to-end prediction for one document: window, encode, score, threshold.
Prediction predict_document(const Document& doc, const ModelParams& params,
                            const TrainConfig& cfg, PredictMode mode, double threshold);

std::string prediction_to_json_line(const Prediction& pred);
Prediction prediction_from_json_line(const std::string& line);
std::vector<Prediction> load_predictions(const std::string& path);
void save_predictions(const std::vector<Prediction>& preds, const std::string& path);

}  // namespace topseg
