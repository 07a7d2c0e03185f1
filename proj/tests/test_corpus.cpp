#include <stdexcept>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "test_util.hpp"
#include "topseg/corpus.hpp"
#include "topseg/rng.hpp"

using namespace topseg;
using testutil::doc_from_topics;
using testutil::random_doc;

namespace {

std::filesystem::path temp_file(const std::string& name) {
    return std::filesystem::temp_directory_path() / ("topseg_test_" + name);
}

}  // namespace

TEST_CASE("boundary_labels marks last sentence of each topic") {
    CHECK(boundary_labels(doc_from_topics("d", {2, 3})) == BoundaryLabels{0, 1, 0, 0});
    CHECK(boundary_labels(doc_from_topics("d", {3})) == BoundaryLabels{0, 0});
    CHECK(boundary_labels(doc_from_topics("d", {1, 1, 1})) == BoundaryLabels{1, 1});
    CHECK(boundary_labels(doc_from_topics("d", {1})).empty());
}

TEST_CASE("boundary_labels rejects invalid documents") {
    Document empty;
    empty.doc_id = "empty";
    CHECK_THROWS_AS(boundary_labels(empty), std::invalid_argument);

    Document bad = doc_from_topics("bad", {1, 1, 1});
    bad.topic_of = {0, 1, 0};
    CHECK_THROWS_WITH_AS(boundary_labels(bad),
                         doctest::Contains("non-contiguous"), std::invalid_argument);
}

TEST_CASE("boundary ones count equals topic count minus one") {
    RngStream rng(77);
    for (int trial = 0; trial < 200; ++trial) {
        const Document doc = random_doc("r" + std::to_string(trial), rng);
        const auto labels = boundary_labels(doc);
        int ones = 0;
        for (int l : labels) ones += l;
        CHECK(ones == doc.topic_of.back() - doc.topic_of.front());
    }
}

TEST_CASE("load_jsonl parses a hand-built record") {
    const auto path = temp_file("corpus_small.jsonl");
    {
        std::ofstream out(path);
        out << R"({"doc_id":"fixture","sentences":[{"tokens":["a","b"]},)"
               R"({"tokens":["c"],"text":"c."},{"tokens":["d"],"candidate":false}],)"
               R"("topic_of":[0,0,1]})"
            << "\n";
    }
    const auto docs = load_jsonl(path.string());
    REQUIRE(docs.size() == 1);
    CHECK(docs[0].doc_id == "fixture");
    CHECK(docs[0].size() == 3);
    CHECK(docs[0].sentences[1].text == "c.");
    CHECK(docs[0].sentences[2].has_candidate_flag);
    CHECK_FALSE(docs[0].sentences[2].candidate);
    CHECK(boundary_labels(docs[0]) == BoundaryLabels{0, 1});
    std::filesystem::remove(path);
}

TEST_CASE("load_jsonl on empty file yields empty corpus") {
    const auto path = temp_file("corpus_empty.jsonl");
    { std::ofstream out(path); }
    CHECK(load_jsonl(path.string()).empty());
    std::filesystem::remove(path);
}

TEST_CASE("load_jsonl reports malformed lines and bad topics") {
    const auto path = temp_file("corpus_bad.jsonl");
    {
        std::ofstream out(path);
        out << R"({"doc_id":"ok","sentences":[{"tokens":["a"]}],"topic_of":[0]})" << "\n";
        out << "{not json\n";
    }
    CHECK_THROWS_WITH_AS(load_jsonl(path.string()), doctest::Contains("line 2"),
                         std::invalid_argument);
    {
        std::ofstream out(path);
        out << R"({"doc_id":"zigzag","sentences":[{"tokens":["a"]},{"tokens":["b"]},)"
               R"({"tokens":["c"]}],"topic_of":[0,1,0]})"
            << "\n";
    }
    CHECK_THROWS_WITH_AS(load_jsonl(path.string()), doctest::Contains("zigzag"),
                         std::invalid_argument);
    CHECK_THROWS_AS(load_jsonl("/nonexistent/corpus.jsonl"), std::runtime_error);
    std::filesystem::remove(path);
}

TEST_CASE("jsonl round trip preserves documents") {
    RngStream rng(5150);
    std::vector<Document> docs;
    for (int i = 0; i < 8; ++i) docs.push_back(random_doc("rt" + std::to_string(i), rng));
    const auto path = temp_file("corpus_rt.jsonl");
    save_jsonl(docs, path.string());
    const auto back = load_jsonl(path.string());
    REQUIRE(back.size() == docs.size());
    for (std::size_t i = 0; i < docs.size(); ++i) {
        CHECK(back[i].doc_id == docs[i].doc_id);
        CHECK(back[i].topic_of == docs[i].topic_of);
        REQUIRE(back[i].size() == docs[i].size());
        for (std::size_t s = 0; s < docs[i].size(); ++s) {
            CHECK(back[i].sentences[s].tokens == docs[i].sentences[s].tokens);
        }
    }
    std::filesystem::remove(path);
}

TEST_CASE("sliding_windows overlap by exactly one sentence") {
    const Document doc = doc_from_topics("w", {2, 3});  // 5 sentences

    SUBCASE("5 sentences, max 3") {
        const auto ws = sliding_windows(doc, 3);
        REQUIRE(ws.size() == 2);
        CHECK(ws[0].size() == 3);
        CHECK(ws[1].size() == 3);
        CHECK(ws[0].sentences[2].tokens == doc.sentences[2].tokens);
        CHECK(ws[1].sentences[0].tokens == doc.sentences[2].tokens);
        CHECK(ws[1].sentences[2].tokens == doc.sentences[4].tokens);
        CHECK(ws[0].topic_of == std::vector<int>{0, 0, 1});
        CHECK(ws[1].topic_of == std::vector<int>{1, 1, 1});
    }
    SUBCASE("fits in one window") {
        const auto ws = sliding_windows(doc, 6);
        REQUIRE(ws.size() == 1);
        CHECK(ws[0].doc_id == doc.doc_id);
        CHECK(ws[0].size() == doc.size());
        CHECK(ws[0].topic_of == doc.topic_of);
    }
    SUBCASE("4 sentences, max 2") {
        const auto ws = sliding_windows(doc_from_topics("w4", {4}), 2);
        REQUIRE(ws.size() == 3);
        for (const auto& w : ws) CHECK(w.size() == 2);
    }
    SUBCASE("max below 2 is an error") {
        CHECK_THROWS_AS(sliding_windows(doc, 1), std::invalid_argument);
    }
}

TEST_CASE("de-overlapped window concatenation reproduces the document") {
    RngStream rng(31337);
    for (int trial = 0; trial < 100; ++trial) {
        const Document doc = random_doc("win" + std::to_string(trial), rng, 4, 5);
        const std::size_t max_s = 2 + rng.next_below(doc.size() + 2);
        const auto ws = sliding_windows(doc, max_s);
        std::vector<std::vector<std::string>> rebuilt;
        for (std::size_t wi = 0; wi < ws.size(); ++wi) {
            for (std::size_t si = (wi == 0 ? 0 : 1); si < ws[wi].size(); ++si) {
                rebuilt.push_back(ws[wi].sentences[si].tokens);
            }
        }
        REQUIRE(rebuilt.size() == doc.size());
        for (std::size_t i = 0; i < doc.size(); ++i) {
            CHECK(rebuilt[i] == doc.sentences[i].tokens);
        }
        for (const auto& w : ws) {
            CHECK(w.size() <= max_s);
            CHECK_NOTHROW(validate_document(w));
        }
    }
}

TEST_CASE("synth_corpus is reproducible and honors its config") {
    SynthConfig cfg;
    cfg.n_docs = 40;
    cfg.seed = 999;

    SUBCASE("byte-identical across runs") {
        const auto a = synth_corpus(cfg);
        const auto b = synth_corpus(cfg);
        REQUIRE(a.size() == b.size());
        for (std::size_t i = 0; i < a.size(); ++i) {
            CHECK(document_to_json_line(a[i]) == document_to_json_line(b[i]));
        }
    }
    SUBCASE("noise_rate 0 keeps every token on its topic cluster") {
        cfg.noise_rate = 0.0;
        for (const auto& doc : synth_corpus(cfg)) {
            for (const auto& [start, end] : topic_runs(doc)) {
                // all tokens in the run share one cluster prefix
                const auto& first = doc.sentences[start].tokens[0];
                const std::string prefix = first.substr(0, first.find('_') + 1);
                for (std::size_t i = start; i <= end; ++i) {
                    for (const auto& tok : doc.sentences[i].tokens) {
                        CHECK(tok.substr(0, prefix.size()) == prefix);
                    }
                }
            }
        }
    }
    SUBCASE("topic and sentence counts stay in range") {
        cfg.n_docs = 200;
        for (const auto& doc : synth_corpus(cfg)) {
            const auto runs = topic_runs(doc);
            CHECK(runs.size() >= static_cast<std::size_t>(cfg.topics_per_doc.lo));
            CHECK(runs.size() <= static_cast<std::size_t>(cfg.topics_per_doc.hi));
            for (const auto& [start, end] : runs) {
                const auto len = end - start + 1;
                CHECK(len >= static_cast<std::size_t>(cfg.sentences_per_topic.lo));
                CHECK(len <= static_cast<std::size_t>(cfg.sentences_per_topic.hi));
            }
            for (const auto& s : doc.sentences) {
                CHECK(s.tokens.size() >= static_cast<std::size_t>(cfg.tokens_per_sentence.lo));
                CHECK(s.tokens.size() <= static_cast<std::size_t>(cfg.tokens_per_sentence.hi));
            }
            CHECK_NOTHROW(validate_document(doc));
        }
    }
    SUBCASE("invalid configs are rejected") {
        SynthConfig bad = cfg;
        bad.n_docs = 0;
        CHECK_THROWS_AS(synth_corpus(bad), std::invalid_argument);
        bad = cfg;
        bad.noise_rate = 1.0;
        CHECK_THROWS_AS(synth_corpus(bad), std::invalid_argument);
        bad = cfg;
        bad.topics_per_doc = {5, 3};
        CHECK_THROWS_AS(synth_corpus(bad), std::invalid_argument);
    }
}
