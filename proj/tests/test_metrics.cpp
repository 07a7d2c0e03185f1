#include <stdexcept>
#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "test_util.hpp"
#include "topseg/metrics.hpp"

using namespace topseg;
using testutil::random_labels;

TEST_CASE("prf conventions") {
    double p, r, f1;

    prf({1, 0, 1}, {1, 0, 1}, p, r, f1);
    CHECK(p == 1.0);
    CHECK(r == 1.0);
    CHECK(f1 == 1.0);

    prf({1, 0, 1}, {0, 0, 0}, p, r, f1);
    CHECK(p == 0.0);
    CHECK(r == 0.0);
    CHECK(f1 == 0.0);

    prf({1, 0, 1, 0}, {1, 1, 0, 0}, p, r, f1);  // TP=1 FP=1 FN=1
    CHECK(p == 0.5);
    CHECK(r == 0.5);
    CHECK(f1 == 0.5);

    prf({0, 0}, {0, 0}, p, r, f1);  // nothing to find, nothing claimed
    CHECK(p == 1.0);
    CHECK(r == 1.0);
    CHECK(f1 == 1.0);

    CHECK_THROWS_AS(prf({1, 0}, {1}, p, r, f1), std::invalid_argument);
}

TEST_CASE("prf candidate mask drops non-candidate positions") {
    double p, r, f1;
    const std::vector<bool> mask{true, false, true};
    // position 1 is a false positive but masked out
    prf({1, 0, 1}, {1, 1, 1}, p, r, f1, &mask);
    CHECK(p == 1.0);
    CHECK(r == 1.0);
    CHECK(f1 == 1.0);
}

TEST_CASE("default_window uses half the mean segment length") {
    // n=10, 2 segments -> round(2.5) = 3 (half up)
    BoundaryLabels ref(9, 0);
    ref[4] = 1;
    CHECK(default_window(ref) == 3);
    // n=4, 1 segment -> 2
    CHECK(default_window({0, 0, 0}) == 2);
    // n=2, 2 segments -> max(1, round(0.5)) = 1
    CHECK(default_window({1}) == 1);
}

TEST_CASE("pk fixed points") {
    const BoundaryLabels ref{0, 1, 0, 0, 1, 0};
    CHECK(pk(ref, ref, 2) == 0.0);
    CHECK(window_diff(ref, ref, 2) == 0.0);

    // single-segment reference, boundary-after-every-sentence hypothesis
    BoundaryLabels flat(9, 0), busy(9, 1);
    CHECK(pk(flat, busy, 5) == 1.0);

    CHECK_THROWS_AS(pk(ref, ref, 0), std::invalid_argument);
    CHECK_THROWS_AS(pk(ref, ref, 7), std::invalid_argument);
    CHECK_THROWS_AS(pk(ref, BoundaryLabels{1}, 1), std::invalid_argument);
}

TEST_CASE("window_diff on the one-segment fixture") {
    // n=4, ref has one segment; hyp adds a boundary after sentence 0, k=2.
    const BoundaryLabels ref{0, 0, 0};
    const BoundaryLabels hyp{1, 0, 0};
    const double expect = oracle::wd_definitional(ref, hyp, 2);
    CHECK(expect == 0.5);  // probes: [0,2) differs, [1,3) agrees
    CHECK(window_diff(ref, hyp, 2) == expect);
}

TEST_CASE("pk and window_diff match the definitional oracle exhaustively (n<=8, k<=3)") {
    for (std::size_t n = 2; n <= 8; ++n) {
        const std::size_t len = n - 1;
        for (unsigned long rbits = 0; rbits < (1UL << len); ++rbits) {
            for (unsigned long hbits = 0; hbits < (1UL << len); ++hbits) {
                BoundaryLabels ref(len), hyp(len);
                for (std::size_t i = 0; i < len; ++i) {
                    ref[i] = (rbits >> i) & 1;
                    hyp[i] = (hbits >> i) & 1;
                }
                for (int k = 1; k <= 3 && static_cast<std::size_t>(k) <= n - 1; ++k) {
                    CHECK(pk(ref, hyp, k) == oracle::pk_definitional(ref, hyp, k));
                    CHECK(window_diff(ref, hyp, k) == oracle::wd_definitional(ref, hyp, k));
                }
            }
        }
    }
}

TEST_CASE("pk and window_diff match the oracle on random instances") {
    RngStream rng(512);
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t n = 2 + rng.next_below(49);
        const auto ref = random_labels(n - 1, rng);
        const auto hyp = random_labels(n - 1, rng);
        const int k = 1 + static_cast<int>(rng.next_below(n - 1));
        const double pk_val = pk(ref, hyp, k);
        const double wd_val = window_diff(ref, hyp, k);
        CHECK(pk_val == oracle::pk_definitional(ref, hyp, k));
        CHECK(wd_val == oracle::wd_definitional(ref, hyp, k));
        CHECK(pk_val >= 0.0);
        CHECK(pk_val <= 1.0);
        CHECK(wd_val >= 0.0);
        CHECK(wd_val <= 1.0);
        CHECK(pk(ref, ref, k) == 0.0);
        CHECK(window_diff(ref, ref, k) == 0.0);
    }
}

TEST_CASE("corpus aggregation: macro vs micro on unequal documents") {
    // doc A: 3 positions, perfect prediction. doc B: 9 positions, all wrong.
    const std::vector<std::string> ids{"A", "B"};
    const std::vector<BoundaryLabels> refs{{1, 0, 1}, {1, 1, 1, 1, 1, 1, 1, 1, 1}};
    const std::vector<BoundaryLabels> hyps{{1, 0, 1}, {0, 0, 0, 0, 0, 0, 0, 0, 0}};
    const CorpusMetrics cm = evaluate_corpus(ids, refs, hyps);

    CHECK(cm.n_docs == 2);
    CHECK(cm.macro.f1 == doctest::Approx(0.5));  // (1 + 0) / 2
    // micro: TP=2, FP=0, FN=9 -> P=1, R=2/11, F1=2*(2/11)/(1+2/11)=4/13
    CHECK(cm.micro.precision == doctest::Approx(1.0));
    CHECK(cm.micro.recall == doctest::Approx(2.0 / 11.0));
    CHECK(cm.micro.f1 == doctest::Approx(4.0 / 13.0));
    REQUIRE(cm.per_doc.size() == 2);
    CHECK(cm.per_doc[0].window_k == default_window(refs[0]));
    CHECK(cm.per_doc[1].window_k == default_window(refs[1]));
}

TEST_CASE("candidate masks from documents") {
    Document doc = testutil::doc_from_topics("c", {2, 2});
    CHECK_FALSE(has_candidate_flags(doc));
    auto mask = candidate_mask(doc);
    REQUIRE(mask.size() == 3);
    CHECK(mask[0]);

    doc.sentences[1].candidate = false;
    doc.sentences[1].has_candidate_flag = true;
    CHECK(has_candidate_flags(doc));
    mask = candidate_mask(doc);
    CHECK_FALSE(mask[1]);
    CHECK(mask[2]);
}
