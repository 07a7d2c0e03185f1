#include "topseg/pairs.hpp"

#include <algorithm>
#include <stdexcept>

namespace topseg {

void validate_cssl_config(const CsslConfig& cfg) {
    if (cfg.k1 < 1) throw std::invalid_argument("k1 must be >= 1");
    if (cfg.k2 < 0) throw std::invalid_argument("k2 must be >= 0");
    if (!(cfg.tau > 0.0)) throw std::invalid_argument("tau must be > 0");
}

std::vector<PairSet> build_pairs(const Document& doc, const CsslConfig& cfg) {
    validate_cssl_config(cfg);
    validate_document(doc);
    const std::size_t n = doc.size();

    std::vector<PairSet> sets;
    sets.reserve(n);
    std::vector<std::size_t> order(n);
    for (std::size_t anchor = 0; anchor < n; ++anchor) {
        PairSet ps;
        ps.anchor = anchor;

        // All other indices sorted by distance, earlier index first on ties.
        order.clear();
        for (std::size_t j = 0; j < n; ++j) {
            if (j != anchor) order.push_back(j);
        }
        auto dist = [anchor](std::size_t j) {
            return j > anchor ? j - anchor : anchor - j;
        };
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            const auto da = dist(a), db = dist(b);
            if (da != db) return da < db;
            return a < b;
        });

        for (std::size_t j : order) {
            const bool same_topic = doc.topic_of[j] == doc.topic_of[anchor];
            if (same_topic && ps.positives.size() < static_cast<std::size_t>(cfg.k1)) {
                ps.positives.push_back(j);
            } else if (!same_topic && ps.negatives.size() < static_cast<std::size_t>(cfg.k2)) {
                ps.negatives.push_back(j);
            }
        }
        if (ps.positives.empty()) {
            ps.negatives.clear();
            ps.excluded = true;
        }
        sets.push_back(std::move(ps));
    }
    return sets;
}

}  // namespace topseg
