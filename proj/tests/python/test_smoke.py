"""Smoke tests for the python binding of the core library."""

import math

import pytest

import topseg


def make_doc(doc_id, topic_sizes):
    doc = topseg.Document()
    doc.doc_id = doc_id
    sentences = []
    topics = []
    idx = 0
    for t, size in enumerate(topic_sizes):
        for _ in range(size):
            s = topseg.Sentence()
            s.index = idx
            s.tokens = [f"topic{t}", f"sent{idx}", doc_id]
            sentences.append(s)
            topics.append(t)
            idx += 1
    doc.sentences = sentences
    doc.topic_of = topics
    return doc


def test_boundary_labels():
    doc = make_doc("d", [2, 3])
    assert topseg.boundary_labels(doc) == [0, 1, 0, 0]


def test_synth_corpus_is_deterministic():
    cfg = topseg.SynthConfig()
    cfg.n_docs = 5
    cfg.seed = 42
    a = topseg.synth_corpus(cfg)
    b = topseg.synth_corpus(cfg)
    assert len(a) == 5
    assert [d.doc_id for d in a] == [d.doc_id for d in b]
    assert a[0].sentences[0].tokens == b[0].sentences[0].tokens


def test_augment_labels_are_ternary():
    cfg = topseg.SynthConfig()
    cfg.n_docs = 4
    cfg.seed = 7
    pool = topseg.synth_corpus(cfg)
    acfg = topseg.AugmentConfig()
    acfg.seed = 3
    aug = topseg.augment_document(pool[0], pool, acfg)
    assert len(aug.tssp_labels) == len(aug.sentences) - 1
    assert set(aug.tssp_labels) <= {0, 1, 2}


def test_pairs_and_cssl_loss():
    doc = make_doc("p", [2, 1])
    ccfg = topseg.CsslConfig()
    ccfg.k1 = 1
    ccfg.k2 = 1
    sets = topseg.build_pairs(doc, ccfg)
    assert sets[0].positives == [1]
    assert sets[2].excluded

    reps = [[1.0, 0.0], [1.0, 0.1], [0.0, 1.0]]
    value, grads = topseg.loss_cssl(reps, sets, 0.1)
    assert value > 0.0
    assert len(grads) == 3


def test_loss_fixed_points():
    value, grad = topseg.loss_ts([0.5], [1])
    assert value == pytest.approx(math.log(2.0), abs=1e-12)
    assert grad[0] == pytest.approx(-2.0, abs=1e-12)
    assert topseg.ensemble_score(1.0, 0.0) == pytest.approx(0.75, abs=1e-12)
    assert topseg.loss_total(1.0, 2.0, 3.0, 0.5, 1.0) == 5.0


def test_metrics():
    assert topseg.pk([0, 1, 0], [0, 1, 0], 1) == 0.0
    assert topseg.window_diff([0, 0, 0], [1, 0, 0], 2) == 0.5
    p, r, f1 = topseg.prf([1, 0, 1, 0], [1, 1, 0, 0])
    assert (p, r, f1) == (0.5, 0.5, 0.5)
    assert topseg.default_window([0, 0, 0]) == 2


def test_train_segment_eval_roundtrip(tmp_path):
    scfg = topseg.SynthConfig()
    scfg.n_docs = 24
    scfg.seed = 99
    corpus = topseg.synth_corpus(scfg)
    train_docs, dev_docs = corpus[:18], corpus[18:]

    cfg = topseg.TrainConfig()
    cfg.epochs = 3
    cfg.feature_dim = 128
    cfg.rep_dim = 8
    cfg.seed = 1
    result = topseg.train(train_docs, cfg, dev_docs)
    assert len(result.log) == 3
    assert result.log[-1].has_dev

    pred = topseg.predict_document(dev_docs[0], result.params, result.config, "prob", 0.5)
    assert len(pred.labels) == len(dev_docs[0]) - 1
    assert len(pred.probs) == len(dev_docs[0]) - 1

    ckpt_path = str(tmp_path / "model.json")
    topseg.save_checkpoint(result.params, result.config, ckpt_path)
    loaded = topseg.load_checkpoint(ckpt_path)
    before = topseg.evaluate_dev(dev_docs, result.params, result.config)
    after = topseg.evaluate_dev(dev_docs, loaded.params, loaded.config)
    assert before.f1 == after.f1
    assert before.pk == after.pk


def test_sliding_windows_roundtrip():
    doc = make_doc("w", [3, 4])
    windows = topseg.sliding_windows(doc, 3)
    rebuilt = []
    for i, w in enumerate(windows):
        start = 0 if i == 0 else 1
        rebuilt.extend(s.tokens for s in w.sentences[start:])
    assert rebuilt == [s.tokens for s in doc.sentences]


def test_validation_errors_surface_as_exceptions():
    doc = make_doc("bad", [1, 1])
    doc.topic_of = [1, 0]
    with pytest.raises(ValueError):
        topseg.boundary_labels(doc)
    with pytest.raises(ValueError):
        topseg.loss_ts([0.5, 0.5], [1])
