#pragma once

#include <string>
#include <vector>

#include "topseg/corpus.hpp"
#include "topseg/rng.hpp"

namespace topseg::testutil {

// Document with the given topic sizes; sentence i gets a unique token plus a
// per-topic token so topics are lexically distinct.
inline Document doc_from_topics(const std::string& id, const std::vector<int>& topic_sizes) {
    Document doc;
    doc.doc_id = id;
    std::size_t idx = 0;
    for (std::size_t t = 0; t < topic_sizes.size(); ++t) {
        for (int s = 0; s < topic_sizes[t]; ++s) {
            Sentence sent;
            sent.index = idx;
            sent.tokens = {"topic" + std::to_string(t), "sent" + std::to_string(idx), id};
            doc.sentences.push_back(std::move(sent));
            doc.topic_of.push_back(static_cast<int>(t));
            ++idx;
        }
    }
    return doc;
}

inline Document random_doc(const std::string& id, RngStream& rng, int max_topics = 5,
                           int max_sent_per_topic = 4) {
    const int n_topics = static_cast<int>(rng.next_in_range(1, max_topics));
    std::vector<int> sizes;
    for (int t = 0; t < n_topics; ++t) {
        sizes.push_back(static_cast<int>(rng.next_in_range(1, max_sent_per_topic)));
    }
    return doc_from_topics(id, sizes);
}

inline BoundaryLabels random_labels(std::size_t len, RngStream& rng) {
    BoundaryLabels labels(len);
    for (auto& l : labels) l = rng.next_bernoulli(0.5) ? 1 : 0;
    return labels;
}

}  // namespace topseg::testutil
