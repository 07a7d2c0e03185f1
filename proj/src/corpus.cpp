#include "topseg/corpus.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "topseg/rng.hpp"

namespace topseg {

using nlohmann::json;

void validate_document(const Document& doc) {
    if (doc.sentences.empty()) {
        throw std::invalid_argument("document '" + doc.doc_id + "' has no sentences");
    }
    if (doc.topic_of.size() != doc.sentences.size()) {
        throw std::invalid_argument("document '" + doc.doc_id +
                                    "': topic_of length does not match sentence count");
    }
    for (std::size_t i = 0; i < doc.sentences.size(); ++i) {
        if (doc.sentences[i].tokens.empty()) {
            throw std::invalid_argument("document '" + doc.doc_id + "': sentence " +
                                        std::to_string(i) + " has no tokens");
        }
        if (doc.sentences[i].index != i) {
            throw std::invalid_argument("document '" + doc.doc_id + "': sentence at position " +
                                        std::to_string(i) + " carries index " +
                                        std::to_string(doc.sentences[i].index));
        }
        if (doc.topic_of[i] < 0) {
            throw std::invalid_argument("document '" + doc.doc_id + "': negative topic id");
        }
    }
    // Topic runs must be contiguous with strictly increasing ids.
    for (std::size_t i = 1; i < doc.topic_of.size(); ++i) {
        if (doc.topic_of[i] < doc.topic_of[i - 1]) {
            throw std::invalid_argument("non-contiguous topics in document '" + doc.doc_id + "'");
        }
    }
}

void validate_synth_config(const SynthConfig& cfg) {
    auto check_range = [](const IntRange& r, const char* name) {
        if (r.lo < 1 || r.hi < r.lo) {
            throw std::invalid_argument(std::string(name) + " range must be non-empty with lo >= 1");
        }
    };
    if (cfg.n_docs < 1) throw std::invalid_argument("n_docs must be >= 1");
    if (cfg.vocab_clusters < 1) throw std::invalid_argument("vocab_clusters must be >= 1");
    if (cfg.cluster_vocab_size < 1) throw std::invalid_argument("cluster_vocab_size must be >= 1");
    check_range(cfg.topics_per_doc, "topics_per_doc");
    check_range(cfg.sentences_per_topic, "sentences_per_topic");
    check_range(cfg.tokens_per_sentence, "tokens_per_sentence");
    if (!(cfg.noise_rate >= 0.0 && cfg.noise_rate < 1.0)) {
        throw std::invalid_argument("noise_rate must be in [0, 1)");
    }
}

BoundaryLabels boundary_labels(const Document& doc) {
    validate_document(doc);
    const std::size_t n = doc.size();
    BoundaryLabels labels;
    labels.reserve(n > 0 ? n - 1 : 0);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        labels.push_back(doc.topic_of[i] != doc.topic_of[i + 1] ? 1 : 0);
    }
    return labels;
}

std::vector<std::pair<std::size_t, std::size_t>> topic_runs(const Document& doc) {
    std::vector<std::pair<std::size_t, std::size_t>> runs;
    const std::size_t n = doc.size();
    std::size_t start = 0;
    for (std::size_t i = 1; i <= n; ++i) {
        if (i == n || doc.topic_of[i] != doc.topic_of[start]) {
            runs.emplace_back(start, i - 1);
            start = i;
        }
    }
    return runs;
}

Document document_from_json_line(const std::string& line) {
    const json rec = json::parse(line);
    Document doc;
    doc.doc_id = rec.at("doc_id").get<std::string>();
    const auto& sents = rec.at("sentences");
    doc.sentences.reserve(sents.size());
    for (std::size_t i = 0; i < sents.size(); ++i) {
        Sentence s;
        s.index = i;
        s.tokens = sents[i].at("tokens").get<std::vector<std::string>>();
        if (sents[i].contains("text")) s.text = sents[i]["text"].get<std::string>();
        if (sents[i].contains("candidate")) {
            s.candidate = sents[i]["candidate"].get<bool>();
            s.has_candidate_flag = true;
        }
        doc.sentences.push_back(std::move(s));
    }
    doc.topic_of = rec.at("topic_of").get<std::vector<int>>();
    validate_document(doc);
    return doc;
}

std::string document_to_json_line(const Document& doc) {
    json rec;
    rec["doc_id"] = doc.doc_id;
    json sents = json::array();
    for (const auto& s : doc.sentences) {
        json js;
        js["tokens"] = s.tokens;
        if (!s.text.empty()) js["text"] = s.text;
        if (s.has_candidate_flag) js["candidate"] = s.candidate;
        sents.push_back(std::move(js));
    }
    rec["sentences"] = std::move(sents);
    rec["topic_of"] = doc.topic_of;
    return rec.dump();
}

std::vector<Document> load_jsonl(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open corpus file: " + path);
    std::vector<Document> docs;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        try {
            docs.push_back(document_from_json_line(line));
        } catch (const json::exception& e) {
            throw std::invalid_argument("malformed corpus line " + std::to_string(lineno) +
                                        ": " + e.what());
        } catch (const std::invalid_argument& e) {
            throw std::invalid_argument("corpus line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return docs;
}

void save_jsonl(const std::vector<Document>& docs, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write corpus file: " + path);
    for (const auto& doc : docs) {
        out << document_to_json_line(doc) << '\n';
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

std::vector<Document> sliding_windows(const Document& doc, std::size_t max_sentences) {
    if (max_sentences < 2) {
        throw std::invalid_argument("max_sentences must be >= 2");
    }
    validate_document(doc);
    const std::size_t n = doc.size();
    std::vector<Document> windows;
    std::size_t start = 0;
    for (;;) {
        const std::size_t end = std::min(start + max_sentences, n);  // exclusive
        Document w;
        w.doc_id = doc.doc_id;
        w.sentences.reserve(end - start);
        for (std::size_t i = start; i < end; ++i) {
            Sentence s = doc.sentences[i];
            s.index = i - start;
            w.sentences.push_back(std::move(s));
            w.topic_of.push_back(doc.topic_of[i]);
        }
        windows.push_back(std::move(w));
        if (end == n) break;
        start = end - 1;  // last sentence of this window starts the next
    }
    return windows;
}

namespace {

std::string cluster_token(int cluster, int k) {
    return "c" + std::to_string(cluster) + "_t" + std::to_string(k);
}

}  // namespace

std::vector<Document> synth_corpus(const SynthConfig& cfg) {
    validate_synth_config(cfg);
    std::vector<Document> docs;
    docs.reserve(static_cast<std::size_t>(cfg.n_docs));
    for (int d = 0; d < cfg.n_docs; ++d) {
        char id[32];
        std::snprintf(id, sizeof(id), "synth-%06d", d);
        Document doc;
        doc.doc_id = id;
        RngStream rng(derive_stream(cfg.seed, doc.doc_id));

        const int n_topics = static_cast<int>(
            rng.next_in_range(cfg.topics_per_doc.lo, cfg.topics_per_doc.hi));
        int prev_cluster = -1;
        std::size_t sent_index = 0;
        for (int t = 0; t < n_topics; ++t) {
            // Adjacent topics use different clusters so every boundary is a
            // genuine vocabulary shift.
            int cluster;
            if (cfg.vocab_clusters == 1) {
                cluster = 0;
            } else {
                do {
                    cluster = static_cast<int>(rng.next_below(cfg.vocab_clusters));
                } while (cluster == prev_cluster);
            }
            prev_cluster = cluster;

            const int n_sents = static_cast<int>(
                rng.next_in_range(cfg.sentences_per_topic.lo, cfg.sentences_per_topic.hi));
            for (int s = 0; s < n_sents; ++s) {
                Sentence sent;
                sent.index = sent_index++;
                const int n_tok = static_cast<int>(
                    rng.next_in_range(cfg.tokens_per_sentence.lo, cfg.tokens_per_sentence.hi));
                sent.tokens.reserve(static_cast<std::size_t>(n_tok));
                for (int k = 0; k < n_tok; ++k) {
                    int c = cluster;
                    if (cfg.noise_rate > 0.0 && cfg.vocab_clusters > 1 &&
                        rng.next_bernoulli(cfg.noise_rate)) {
                        do {
                            c = static_cast<int>(rng.next_below(cfg.vocab_clusters));
                        } while (c == cluster);
                    }
                    sent.tokens.push_back(
                        cluster_token(c, static_cast<int>(rng.next_below(cfg.cluster_vocab_size))));
                }
                doc.sentences.push_back(std::move(sent));
                doc.topic_of.push_back(t);
            }
        }
        docs.push_back(std::move(doc));
    }
    return docs;
}

}  // namespace topseg
