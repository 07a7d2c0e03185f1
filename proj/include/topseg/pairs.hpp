#pragma once

#include <cstdint>
#include <vector>

#include "topseg/corpus.hpp"

namespace topseg {

/// Contrastive pair indices for one anchor sentence. Both lists are ordered
/// by |index - anchor| ascending; at equal distance the earlier index wins.
struct PairSet {
    std::size_t anchor = 0;
    std::vector<std::size_t> positives;  // same topic, at most k1
    std::vector<std::size_t> negatives;  // different topic, at most k2
    bool excluded = false;               // anchor had no same-topic candidate
};

struct CsslConfig {
    int k1 = 1;
    int k2 = 3;
    double tau = 0.1;
};

void validate_cssl_config(const CsslConfig& cfg);

/// One PairSet per sentence, from ground-truth topic structure. Deterministic.
/// Anchors in singleton topics come back flagged `excluded` with empty
/// positives; the contrastive loss skips them.
std::vector<PairSet> build_pairs(const Document& doc, const CsslConfig& cfg);

}  // namespace topseg
