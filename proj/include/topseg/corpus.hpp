#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace topseg {

/// One sentence of a document. All computation runs on the token list;
/// `text` is kept only for display and may be empty.
struct Sentence {
    std::size_t index = 0;               // 0-based position in its document
    std::vector<std::string> tokens;
    std::string text;
    bool candidate = true;               // eligible as a boundary position
    bool has_candidate_flag = false;     // true when the corpus carried the flag
};

/// A document: ordered sentences partitioned into contiguous topics.
/// Topic ids must be non-negative and strictly increasing run by run.
struct Document {
    std::string doc_id;
    std::vector<Sentence> sentences;
    std::vector<int> topic_of;           // topic id per sentence index

    std::size_t size() const { return sentences.size(); }
};

/// n-1 binary labels; labels[i] = 1 iff sentence i is the last of its topic.
using BoundaryLabels = std::vector<int>;

struct IntRange {
    int lo = 1;
    int hi = 1;
};

/// Synthetic-corpus generator settings. Each topic draws its tokens from one
/// vocabulary cluster, with noise_rate of tokens drawn off-cluster.
struct SynthConfig {
    int n_docs = 100;
    int vocab_clusters = 12;
    int cluster_vocab_size = 50;
    IntRange topics_per_doc{3, 8};
    IntRange sentences_per_topic{3, 6};
    IntRange tokens_per_sentence{4, 10};
    double noise_rate = 0.15;
    std::uint64_t seed = 1234;
};

/// Throws std::invalid_argument if the document violates an invariant
/// (empty, topic_of length mismatch, negative or non-contiguous topic ids).
void validate_document(const Document& doc);

void validate_synth_config(const SynthConfig& cfg);

BoundaryLabels boundary_labels(const Document& doc);

/// Start/end (inclusive) sentence index of each topic run, in order.
std::vector<std::pair<std::size_t, std::size_t>> topic_runs(const Document& doc);

/// Parses one document per line; validates topic contiguity. Errors carry the
/// 1-based line number and, for invariant violations, the doc_id.
std::vector<Document> load_jsonl(const std::string& path);

void save_jsonl(const std::vector<Document>& docs, const std::string& path);

/// Serialization of a single document to the corpus JSONL record (one line,
/// no trailing newline).
std::string document_to_json_line(const Document& doc);
Document document_from_json_line(const std::string& line);

/// Splits into windows of at most max_sentences, consecutive windows sharing
/// exactly one sentence (last of previous = first of next).
std::vector<Document> sliding_windows(const Document& doc, std::size_t max_sentences);

/// Deterministic for a fixed config; per-document RNG streams are derived
/// from seed and doc_id, so generation order does not matter.
std::vector<Document> synth_corpus(const SynthConfig& cfg);

}  // namespace topseg
