"""Smoke tests for the python bindings: one thin pass over each module."""

import json
import math

import pytest

import geccl


def test_corpus_roundtrip():
    examples = geccl.parse_parallel("She go home\tShe goes home\nHello .\tHello .\n")
    assert [e.identical for e in examples] == [False, True]
    changed, identical = geccl.partition_identical(geccl.deduplicate(examples))
    assert len(changed) == 1 and len(identical) == 1

    m2 = "S She go home\nA 1 2|||VERB|||goes|||REQUIRED|||-NONE-|||0\n"
    corpus = geccl.parse_m2(m2)
    assert geccl.write_m2(corpus) == m2
    with pytest.raises(geccl.ParseError):
        geccl.parse_parallel("missing tab\n")


def test_difficulty_scoring():
    assert geccl.extract_score("I would rate this a 7 out of 10.") == 7
    assert geccl.bucket(3) == geccl.Tier.Easy
    assert geccl.bucket(8) == geccl.Tier.Hard
    with pytest.raises(geccl.UnscorableResponse):
        geccl.extract_score("fine as is")

    examples = geccl.parse_parallel("a b\ta c\nd e\td f\n")
    backend = geccl.ReplayBackend(["score: 4"])
    scores = geccl.score_batch(backend, examples)
    assert [s.score for s in scores] == [4, 4]
    assert backend.calls() == 2


def test_curriculum_and_student():
    tiers = geccl.TieredCorpus()
    examples = geccl.parse_parallel("a b\ta c\nd e\td f\ng h\tg i\n")
    tiers.easy, tiers.medium, tiers.hard = [examples[0]], [examples[1]], [examples[2]]
    plan = geccl.plan(geccl.Strategy.EasyCumulative, tiers, geccl.IdenticalPolicy.Exclude, 7)
    assert [s.name for s in plan.stages] == ["E", "EM", "EMH"]
    assert geccl.validate_plan(plan) == []

    dataset = geccl.stage_dataset(plan, 2, examples)
    model, metrics = geccl.train_stage(geccl.StudentModel(), dataset, geccl.TrainConfig())
    corrected, applied = geccl.correct(model, ["a", "b"])
    assert corrected == ["a", "c"]


def test_eval_metrics():
    assert abs(geccl.f_beta(2, 1, 2, 0.5) - 0.625) < 1e-12
    gold = geccl.parse_m2("S She go home\nA 1 2|||V|||goes|||REQUIRED|||-NONE-|||0\n")
    result = geccl.m2_score([["She", "go", "home"]], [["She", "goes", "home"]], gold)
    assert (result.tp, result.fp, result.fn) == (1, 0, 0)
    ct = geccl.classify_op_level(0, 2, ["he", "is"], ["is", "he", "here"])
    assert ct == geccl.OpType.WordOrder
    assert abs(geccl.student_t_two_sided_p(2.0, 10) - 0.0734) < 1e-3


def test_pipeline_end_to_end(tmp_path):
    spec = geccl.SyntheticSpec()
    spec.n_pairs = 120
    spec.n_dev = 20
    spec.n_test = 25
    spec.seed = 9
    corpus = geccl.gen_synthetic(spec)
    (tmp_path / "corpus.tsv").write_text(corpus.parallel_tsv)
    (tmp_path / "dev.m2").write_text(corpus.gold_dev_m2)
    (tmp_path / "test.m2").write_text(corpus.gold_test_m2)

    config = geccl.RunConfig()
    config.corpus_path = str(tmp_path / "corpus.tsv")
    config.gold_dev_path = str(tmp_path / "dev.m2")
    config.gold_test_path = str(tmp_path / "test.m2")
    config.out_dir = str(tmp_path / "runs")
    config.run_id = "smoke"
    config.backend = "oracle"
    artifacts = geccl.run_pipeline(config)
    assert len(artifacts.report.stages) == 3
    report = json.loads((tmp_path / "runs" / "smoke" / "report.json").read_text())
    assert [s["name"] for s in report["stages"]] == ["E", "EM", "EMH"]
    for stage in report["stages"]:
        assert 0.0 <= stage["f_half"] <= 1.0
        assert not math.isnan(stage["f_half"])
