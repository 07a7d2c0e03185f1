#include "topseg/augment.hpp"

#include <stdexcept>

#include "json.hpp"

namespace topseg {

std::size_t AugmentDraft::sentence_count() const {
    std::size_t n = 0;
    for (const auto& run : runs) n += run.size();
    return n;
}

AugmentDraft make_draft(const Document& doc) {
    validate_document(doc);
    AugmentDraft draft;
    draft.doc_id = doc.doc_id;
    for (const auto& [start, end] : topic_runs(doc)) {
        AugmentDraft::TopicRun run;
        run.reserve(end - start + 1);
        for (std::size_t i = start; i <= end; ++i) {
            run.push_back({doc.sentences[i],
                           Provenance{doc.doc_id, doc.topic_of[i], i}});
        }
        draft.runs.push_back(std::move(run));
    }
    return draft;
}

void shuffle_topics(AugmentDraft& draft, RngStream& rng) {
    rng.shuffle(draft.runs);
}

void replace_topics(AugmentDraft& draft, const std::vector<Document>& pool,
                    const AugmentConfig& cfg, RngStream& rng) {
    // Donor inventory: every topic of every pool document other than this one.
    struct Donor {
        const Document* doc;
        std::size_t start, end;
    };
    std::vector<Donor> donors;
    for (const auto& d : pool) {
        if (d.doc_id == draft.doc_id) continue;
        for (const auto& [start, end] : topic_runs(d)) {
            donors.push_back({&d, start, end});
        }
    }
    if (donors.empty()) {
        throw std::invalid_argument("replacement pool contains no document other than '" +
                                    draft.doc_id + "'");
    }

    if (!rng.next_bernoulli(cfg.p1)) return;  // document not selected this round

    for (auto& run : draft.runs) {
        if (!rng.next_bernoulli(cfg.p2)) continue;
        const Donor& donor = donors[rng.next_below(donors.size())];
        AugmentDraft::TopicRun replacement;
        replacement.reserve(donor.end - donor.start + 1);
        for (std::size_t i = donor.start; i <= donor.end; ++i) {
            replacement.push_back({donor.doc->sentences[i],
                                   Provenance{donor.doc->doc_id, donor.doc->topic_of[i], i}});
        }
        run = std::move(replacement);
    }
}

void shuffle_within_topics(AugmentDraft& draft, RngStream& rng) {
    for (auto& run : draft.runs) {
        rng.shuffle(run);
    }
}

namespace {

int pair_label(const Provenance& a, const Provenance& b) {
    if (!a.same_topic(b)) return 0;
    if (b.src_sentence_index == a.src_sentence_index + 1) return 1;
    return 2;
}

}  // namespace

std::vector<int> tssp_labels(const AugmentDraft& draft) {
    std::vector<const Provenance*> flat;
    flat.reserve(draft.sentence_count());
    for (const auto& run : draft.runs) {
        for (const auto& ts : run) flat.push_back(&ts.prov);
    }
    std::vector<int> labels;
    if (flat.size() < 2) return labels;
    labels.reserve(flat.size() - 1);
    for (std::size_t i = 0; i + 1 < flat.size(); ++i) {
        labels.push_back(pair_label(*flat[i], *flat[i + 1]));
    }
    return labels;
}

AugmentedDocument finalize_draft(const AugmentDraft& draft) {
    AugmentedDocument aug;
    aug.doc_id = draft.doc_id;
    for (const auto& run : draft.runs) {
        for (const auto& ts : run) {
            Sentence s = ts.sentence;
            s.index = aug.sentences.size();
            aug.sentences.push_back(std::move(s));
            aug.provenance.push_back(ts.prov);
        }
    }
    aug.tssp_labels = tssp_labels(draft);
    return aug;
}

AugmentedDocument augment_document(const Document& doc, const std::vector<Document>& pool,
                                   const AugmentConfig& cfg) {
    if (!(cfg.p1 >= 0.0 && cfg.p1 <= 1.0) || !(cfg.p2 >= 0.0 && cfg.p2 <= 1.0)) {
        throw std::invalid_argument("p1 and p2 must be in [0, 1]");
    }
    AugmentDraft draft = make_draft(doc);
    RngStream rng(derive_stream(cfg.seed, doc.doc_id));
    if (cfg.shuffle_topics) shuffle_topics(draft, rng);
    replace_topics(draft, pool, cfg, rng);
    if (cfg.shuffle_sentences) shuffle_within_topics(draft, rng);
    return finalize_draft(draft);
}

std::string augmented_to_json_line(const AugmentedDocument& aug) {
    nlohmann::json rec;
    rec["doc_id"] = aug.doc_id;
    nlohmann::json sents = nlohmann::json::array();
    for (const auto& s : aug.sentences) {
        nlohmann::json js;
        js["tokens"] = s.tokens;
        if (!s.text.empty()) js["text"] = s.text;
        sents.push_back(std::move(js));
    }
    rec["sentences"] = std::move(sents);
    // Topic ids of the perturbed document: a fresh id per provenance run.
    std::vector<int> topic_of;
    int run_id = 0;
    for (std::size_t i = 0; i < aug.provenance.size(); ++i) {
        if (i > 0 && !aug.provenance[i].same_topic(aug.provenance[i - 1])) ++run_id;
        topic_of.push_back(run_id);
    }
    rec["topic_of"] = topic_of;
    nlohmann::json prov = nlohmann::json::array();
    for (const auto& p : aug.provenance) {
        prov.push_back({{"src_doc_id", p.src_doc_id},
                        {"src_topic_id", p.src_topic_id},
                        {"src_sentence_index", p.src_sentence_index}});
    }
    rec["provenance"] = std::move(prov);
    rec["tssp_labels"] = aug.tssp_labels;
    return rec.dump();
}

}  // namespace topseg
