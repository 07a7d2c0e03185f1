#pragma once

#include <string>
#include <vector>

#include "topseg/corpus.hpp"

namespace topseg {

struct MetricReport {
    double f1 = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double pk = 0.0;
    double wd = 0.0;
    int window_k = 1;
};

struct PrfCounts {
    long tp = 0;
    long fp = 0;
    long fn = 0;
};

/// Precision/recall/F1 on the boundary class. With no predicted and no
/// reference boundaries all three are 1; with reference boundaries missed
/// entirely they are 0. An optional per-position candidate mask drops
/// non-candidate positions from the counts.
PrfCounts prf_counts(const BoundaryLabels& ref, const BoundaryLabels& hyp,
                     const std::vector<bool>* candidate_mask = nullptr);
void prf(const BoundaryLabels& ref, const BoundaryLabels& hyp,
         double& precision, double& recall, double& f1,
         const std::vector<bool>* candidate_mask = nullptr);

/// k = max(1, round-half-up(n / (2 * segments))): half the mean segment length.
int default_window(const BoundaryLabels& ref);

/// Fraction of probe pairs (i, i+k) on which ref and hyp disagree about
/// whether the two sentences share a segment.
double pk(const BoundaryLabels& ref, const BoundaryLabels& hyp, int k);

/// Fraction of length-k probe windows whose internal boundary counts differ.
double window_diff(const BoundaryLabels& ref, const BoundaryLabels& hyp, int k);

/// Raw disagreement counts, for micro aggregation across documents.
void pk_counts(const BoundaryLabels& ref, const BoundaryLabels& hyp, int k,
               long& disagreements, long& probes);
void wd_counts(const BoundaryLabels& ref, const BoundaryLabels& hyp, int k,
               long& disagreements, long& probes);

/// Per-document report with k = default_window(ref).
MetricReport evaluate_document(const BoundaryLabels& ref, const BoundaryLabels& hyp,
                               const std::vector<bool>* candidate_mask = nullptr);

struct CorpusMetrics {
    MetricReport macro;             // per-document metrics, equally weighted
    MetricReport micro;             // pooled counts across documents
    double mean_window_k = 0.0;
    std::size_t n_docs = 0;
    std::vector<MetricReport> per_doc;
    std::vector<std::string> doc_ids;
};

CorpusMetrics evaluate_corpus(const std::vector<std::string>& doc_ids,
                              const std::vector<BoundaryLabels>& refs,
                              const std::vector<BoundaryLabels>& hyps,
                              const std::vector<std::vector<bool>>* candidate_masks = nullptr);

/// Candidate mask for a document's boundary positions (sentence i's flag
/// governs position i). Null-equivalent (all true) when the corpus carried
/// no flags.
std::vector<bool> candidate_mask(const Document& doc);
bool has_candidate_flags(const Document& doc);

}  // namespace topseg
