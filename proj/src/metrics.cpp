#include "topseg/metrics.hpp"

#include <cmath>
#include <stdexcept>

namespace topseg {

PrfCounts prf_counts(const BoundaryLabels& ref, const BoundaryLabels& hyp,
                     const std::vector<bool>* candidate_mask) {
    if (ref.size() != hyp.size()) {
        throw std::invalid_argument("prf: ref and hyp length mismatch");
    }
    if (candidate_mask && candidate_mask->size() != ref.size()) {
        throw std::invalid_argument("prf: candidate mask length mismatch");
    }
    PrfCounts c;
    for (std::size_t i = 0; i < ref.size(); ++i) {
        if (candidate_mask && !(*candidate_mask)[i]) continue;
        if (ref[i] == 1 && hyp[i] == 1) ++c.tp;
        else if (ref[i] == 0 && hyp[i] == 1) ++c.fp;
        else if (ref[i] == 1 && hyp[i] == 0) ++c.fn;
    }
    return c;
}

namespace {

void prf_from_counts(const PrfCounts& c, double& precision, double& recall, double& f1) {
    if (c.tp + c.fp == 0 && c.tp + c.fn == 0) {
        // No boundaries anywhere, predicted or actual: perfect by convention.
        precision = recall = f1 = 1.0;
        return;
    }
    precision = (c.tp + c.fp > 0) ? static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp) : 0.0;
    recall = (c.tp + c.fn > 0) ? static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn) : 0.0;
    f1 = (precision + recall > 0.0) ? 2.0 * precision * recall / (precision + recall) : 0.0;
}

}  // namespace

void prf(const BoundaryLabels& ref, const BoundaryLabels& hyp,
         double& precision, double& recall, double& f1,
         const std::vector<bool>* candidate_mask) {
    prf_from_counts(prf_counts(ref, hyp, candidate_mask), precision, recall, f1);
}

int default_window(const BoundaryLabels& ref) {
    const std::size_t n = ref.size() + 1;  // sentence count
    long segments = 1;
    for (int b : ref) segments += b;
    // round half up, floored at 1
    const double half_mean = static_cast<double>(n) / (2.0 * static_cast<double>(segments));
    const int k = static_cast<int>(std::floor(half_mean + 0.5));
    return std::max(1, k);
}

namespace {

void check_window(const BoundaryLabels& ref, const BoundaryLabels& hyp, int k) {
    if (ref.size() != hyp.size()) {
        throw std::invalid_argument("segmentation metric: ref and hyp length mismatch");
    }
    const std::size_t n = ref.size() + 1;
    if (k < 1 || static_cast<std::size_t>(k) > n - 1) {
        throw std::invalid_argument("segmentation metric: window k out of [1, n-1]");
    }
}

// cum[i] = number of boundaries among labels[0..i-1]; boundaries between
// sentences a and b (a < b) = cum[b] - cum[a].
std::vector<long> boundary_prefix(const BoundaryLabels& labels) {
    std::vector<long> cum(labels.size() + 1, 0);
    for (std::size_t i = 0; i < labels.size(); ++i) {
        cum[i + 1] = cum[i] + labels[i];
    }
    return cum;
}

}  // namespace

void pk_counts(const BoundaryLabels& ref, const BoundaryLabels& hyp, int k,
               long& disagreements, long& probes) {
    check_window(ref, hyp, k);
    const std::size_t n = ref.size() + 1;
    const auto cref = boundary_prefix(ref);
    const auto chyp = boundary_prefix(hyp);
    disagreements = 0;
    probes = 0;
    for (std::size_t i = 0; i + static_cast<std::size_t>(k) < n; ++i) {
        const bool same_ref = (cref[i + k] - cref[i]) == 0;
        const bool same_hyp = (chyp[i + k] - chyp[i]) == 0;
        if (same_ref != same_hyp) ++disagreements;
        ++probes;
    }
}

double pk(const BoundaryLabels& ref, const BoundaryLabels& hyp, int k) {
    long d = 0, p = 0;
    pk_counts(ref, hyp, k, d, p);
    return p > 0 ? static_cast<double>(d) / static_cast<double>(p) : 0.0;
}

void wd_counts(const BoundaryLabels& ref, const BoundaryLabels& hyp, int k,
               long& disagreements, long& probes) {
    check_window(ref, hyp, k);
    const std::size_t n = ref.size() + 1;
    const auto cref = boundary_prefix(ref);
    const auto chyp = boundary_prefix(hyp);
    disagreements = 0;
    probes = 0;
    for (std::size_t i = 0; i + static_cast<std::size_t>(k) < n; ++i) {
        const long bref = cref[i + k] - cref[i];
        const long bhyp = chyp[i + k] - chyp[i];
        if (bref != bhyp) ++disagreements;
        ++probes;
    }
}

double window_diff(const BoundaryLabels& ref, const BoundaryLabels& hyp, int k) {
    long d = 0, p = 0;
    wd_counts(ref, hyp, k, d, p);
    return p > 0 ? static_cast<double>(d) / static_cast<double>(p) : 0.0;
}

MetricReport evaluate_document(const BoundaryLabels& ref, const BoundaryLabels& hyp,
                               const std::vector<bool>* candidate_mask) {
    MetricReport r;
    r.window_k = default_window(ref);
    prf(ref, hyp, r.precision, r.recall, r.f1, candidate_mask);
    if (!ref.empty()) {
        r.pk = pk(ref, hyp, r.window_k);
        r.wd = window_diff(ref, hyp, r.window_k);
    }
    return r;
}

CorpusMetrics evaluate_corpus(const std::vector<std::string>& doc_ids,
                              const std::vector<BoundaryLabels>& refs,
                              const std::vector<BoundaryLabels>& hyps,
                              const std::vector<std::vector<bool>>* candidate_masks) {
    if (refs.size() != hyps.size() || refs.size() != doc_ids.size()) {
        throw std::invalid_argument("evaluate_corpus: input lengths mismatch");
    }
    CorpusMetrics out;
    out.n_docs = refs.size();
    out.doc_ids = doc_ids;

    PrfCounts pooled;
    long pk_dis = 0, pk_probes = 0, wd_dis = 0, wd_probes = 0;
    double sum_f1 = 0, sum_p = 0, sum_r = 0, sum_pk = 0, sum_wd = 0, sum_k = 0;

    for (std::size_t d = 0; d < refs.size(); ++d) {
        const std::vector<bool>* mask =
            candidate_masks ? &(*candidate_masks)[d] : nullptr;
        MetricReport r = evaluate_document(refs[d], hyps[d], mask);
        out.per_doc.push_back(r);
        sum_f1 += r.f1;
        sum_p += r.precision;
        sum_r += r.recall;
        sum_pk += r.pk;
        sum_wd += r.wd;
        sum_k += r.window_k;

        const PrfCounts c = prf_counts(refs[d], hyps[d], mask);
        pooled.tp += c.tp;
        pooled.fp += c.fp;
        pooled.fn += c.fn;
        if (!refs[d].empty()) {
            long dis = 0, probes = 0;
            pk_counts(refs[d], hyps[d], r.window_k, dis, probes);
            pk_dis += dis;
            pk_probes += probes;
            wd_counts(refs[d], hyps[d], r.window_k, dis, probes);
            wd_dis += dis;
            wd_probes += probes;
        }
    }

    const double nd = out.n_docs > 0 ? static_cast<double>(out.n_docs) : 1.0;
    out.macro.f1 = sum_f1 / nd;
    out.macro.precision = sum_p / nd;
    out.macro.recall = sum_r / nd;
    out.macro.pk = sum_pk / nd;
    out.macro.wd = sum_wd / nd;
    out.mean_window_k = sum_k / nd;
    out.macro.window_k = static_cast<int>(std::floor(out.mean_window_k + 0.5));

    prf_from_counts(pooled, out.micro.precision, out.micro.recall, out.micro.f1);
    out.micro.pk = pk_probes > 0 ? static_cast<double>(pk_dis) / static_cast<double>(pk_probes) : 0.0;
    out.micro.wd = wd_probes > 0 ? static_cast<double>(wd_dis) / static_cast<double>(wd_probes) : 0.0;
    out.micro.window_k = out.macro.window_k;
    return out;
}

std::vector<bool> candidate_mask(const Document& doc) {
    std::vector<bool> mask;
    if (doc.size() < 2) return mask;
    mask.reserve(doc.size() - 1);
    for (std::size_t i = 0; i + 1 < doc.size(); ++i) {
        mask.push_back(doc.sentences[i].candidate);
    }
    return mask;
}

bool has_candidate_flags(const Document& doc) {
    for (const auto& s : doc.sentences) {
        if (s.has_candidate_flag) return true;
    }
    return false;
}

}  // namespace topseg
