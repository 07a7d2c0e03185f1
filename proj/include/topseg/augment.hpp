#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "topseg/corpus.hpp"
#include "topseg/rng.hpp"

namespace topseg {

/// Identifies the original (document, topic, sentence) a perturbed sentence
/// came from. Structural pair labels are derived from this, never from text.
struct Provenance {
    std::string src_doc_id;
    int src_topic_id = 0;
    std::size_t src_sentence_index = 0;  // 0-based index within the source document

    bool same_topic(const Provenance& other) const {
        return src_doc_id == other.src_doc_id && src_topic_id == other.src_topic_id;
    }
};

struct AugmentConfig {
    double p1 = 0.5;               // document-level replacement eligibility
    double p2 = 0.5;               // per-topic replacement probability
    bool shuffle_topics = true;    // permute topic order
    bool shuffle_sentences = true; // permute sentence order within each topic
    std::uint64_t seed = 0;
};

/// Perturbed document plus the 3-class structural label of each adjacent pair:
///   0 = pair originates from different topics
///   1 = same original topic, second sentence directly followed the first
///   2 = same original topic, any other arrangement
struct AugmentedDocument {
    std::string doc_id;
    std::vector<Sentence> sentences;       // re-indexed 0..m-1
    std::vector<Provenance> provenance;    // one per sentence
    std::vector<int> tssp_labels;          // length m-1
};

/// Working form of a document under perturbation: topic runs of
/// provenance-tagged sentences. Runs move and fill as units.
struct AugmentDraft {
    struct TaggedSentence {
        Sentence sentence;
        Provenance prov;
    };
    using TopicRun = std::vector<TaggedSentence>;

    std::string doc_id;
    std::vector<TopicRun> runs;

    std::size_t sentence_count() const;
};

AugmentDraft make_draft(const Document& doc);

/// Uniformly permutes the topic runs; within-run order is untouched.
void shuffle_topics(AugmentDraft& draft, RngStream& rng);

/// With probability p1 the document is selected; in a selected document each
/// run is independently swapped (probability p2) for a whole topic drawn
/// uniformly over all (other document, topic) pairs in the pool.
void replace_topics(AugmentDraft& draft, const std::vector<Document>& pool,
                    const AugmentConfig& cfg, RngStream& rng);

void shuffle_within_topics(AugmentDraft& draft, RngStream& rng);

/// Labels each adjacent sentence pair from provenance alone. Total function:
/// exactly one of the three rules applies to every pair.
std::vector<int> tssp_labels(const AugmentDraft& draft);

/// Flattens a draft, re-indexing sentences and attaching pair labels.
AugmentedDocument finalize_draft(const AugmentDraft& draft);

/// Full pipeline: shuffle topics, replace topics, shuffle within topics,
/// label. The RNG stream is derived from cfg.seed and the doc_id.
AugmentedDocument augment_document(const Document& doc, const std::vector<Document>& pool,
                                   const AugmentConfig& cfg);

/// JSONL record for inspection: corpus schema plus provenance and labels.
std::string augmented_to_json_line(const AugmentedDocument& aug);

}  // namespace topseg
