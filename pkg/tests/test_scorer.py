"""
Tests for event scoring, aggregation and report rendering.
"""

import json
import random

import pytest

from src.annotation.standoff import AnnotationDoc, parse_standoff
from src.error_handling import ConfigurationError, ScoringError
from src.fixtures import EXAMPLE_NOTE, GOLD_STANDOFF
from src.scoring.report import Counts, EvalReport, aggregate, emit_report
from src.scoring.scorer import CRITERIA_PRESETS, MatchCriteria, parse_criteria, score_corpus, score_doc

from tests.generators import random_doc

LIVING = (
    "T1\tLivingStatus 88 97\tResidence\n"
    "T2\tTypeLiving 110 131\twith husband and kids\n"
    "T3\tStatusTime 88 97\tResidence\n"
    "A1\tTypeLivingVal T2 with_family\n"
    "A2\tStatusTimeVal T3 current\n"
    "E1\tLivingStatus:T1 Type:T2 Status:T3\n"
)
SPURIOUS_TOBACCO = "T4\tTobacco 9 20\tTobacco Use\nE2\tTobacco:T4\n"


def _doc(ann):
    doc, _ = parse_standoff(ann, EXAMPLE_NOTE, strict=True)
    return doc


def _row(table, name):
    for line in table.splitlines():
        if line.strip().startswith(name + " "):
            return " ".join(line.split())
    raise AssertionError(f"no row {name}")


def test_self_match_is_perfect(schema):
    """A document scored against itself has no errors in any category."""
    rng = random.Random(2718)
    for _ in range(200):
        doc = random_doc(rng, schema)
        for matching in ("greedy", "optimal"):
            report = score_doc(doc, doc, schema, matching=matching)
            for key, counts in report.populated():
                assert counts.fp == 0 and counts.fn == 0, key
                assert counts.f1 == 1.0


def test_gold_against_itself(gold_doc, schema):
    """The gold example scores F1 1.0 with five triggers and six arguments."""
    micro = score_doc(gold_doc, gold_doc, schema).micro()
    assert micro["micro-trigger"] == Counts(5, 0, 0)
    assert micro["micro-argument"] == Counts(6, 0, 0)
    assert micro["micro-overall"].f1 == 1.0


def test_spurious_trigger(schema):
    """One extra Tobacco event: LivingStatus is perfect, Tobacco is one FP."""
    report = score_doc(_doc(LIVING), _doc(LIVING + SPURIOUS_TOBACCO), schema)
    assert report.counts["trigger:LivingStatus"] == Counts(1, 0, 0)
    assert report.counts["trigger:Tobacco"] == Counts(0, 1, 0)
    micro = report.micro()["micro-trigger"]
    assert round(micro.precision, 4) == 0.5
    assert micro.recall == 1.0
    assert round(micro.f1, 4) == 0.6667
    assert _row(emit_report(report, "table"), "micro-trigger") == "micro-trigger 1 1 0 0.5000 1.0000 0.6667"


def test_empty_prediction(gold_doc, schema):
    """An empty prediction leaves every gold item a false negative."""
    report = score_doc(gold_doc, AnnotationDoc(EXAMPLE_NOTE), schema)
    assert report.micro()["micro-trigger"] == Counts(0, 0, 5)
    assert report.micro()["micro-argument"] == Counts(0, 0, 6)
    assert report.micro()["micro-overall"].f1 == 0.0


def test_false_positives_and_negatives_swap(gold_doc, schema):
    """Swapping gold and prediction swaps FP and FN."""
    pred = _doc(LIVING + SPURIOUS_TOBACCO)
    forward = score_doc(gold_doc, pred, schema)
    backward = score_doc(pred, gold_doc, schema)
    for key, counts in forward.counts.items():
        assert backward.counts[key] == Counts(counts.tp, counts.fn, counts.fp)


def test_note_mismatch(gold_doc, schema):
    """Documents over different notes cannot be compared."""
    with pytest.raises(ScoringError):
        score_doc(gold_doc, AnnotationDoc(EXAMPLE_NOTE + "x"), schema)


def test_wrong_subtype_is_an_argument_error(schema):
    """A Status argument with the wrong subtype misses under both presets."""
    pred = _doc(LIVING.replace("T3 current", "T3 past"))
    for preset in ("default", "exact"):
        report = score_doc(_doc(LIVING), pred, schema, CRITERIA_PRESETS[preset])
        assert report.counts["argument:LivingStatus:Status"] == Counts(0, 1, 1)
        assert report.counts["argument:LivingStatus:Type"] == Counts(1, 0, 0)
        assert report.counts["subtype:Status:past"] == Counts(0, 1, 0)
        assert report.counts["subtype:Status:current"] == Counts(0, 0, 1)


def test_exact_trigger_criteria(schema):
    """A trigger span shifted by one character matches on overlap only."""
    gold = _doc("T1\tEmployment 132 135\tJob\nE1\tEmployment:T1\n")
    pred = _doc("T1\tEmployment 133 135\tob\nE1\tEmployment:T1\n")
    assert score_doc(gold, pred, schema).counts["trigger:Employment"] == Counts(1, 0, 0)
    exact = score_doc(gold, pred, schema, parse_criteria("trigger=exact+type"))
    assert exact.counts["trigger:Employment"] == Counts(0, 1, 1)


def test_optimal_matching_beats_greedy(schema):
    """Greedy can strand a prediction that optimal assignment places."""
    gold = _doc(
        "T1\tAlcohol 31 42\tAlcohol Use\n"
        "T2\tAlcohol 44 50\tdenies\n"
        "E1\tAlcohol:T1\nE2\tAlcohol:T2\n"
    )
    # the first prediction overlaps both gold triggers, the second only the first one
    pred = _doc(
        "T1\tAlcohol 39 46\tUse: de\n"
        "T2\tAlcohol 40 42\tse\n"
        "E1\tAlcohol:T1\nE2\tAlcohol:T2\n"
    )
    greedy = score_doc(gold, pred, schema, matching="greedy").counts["trigger:Alcohol"]
    optimal = score_doc(gold, pred, schema, matching="optimal").counts["trigger:Alcohol"]
    assert optimal == Counts(2, 0, 0)
    assert greedy.tp <= optimal.tp


def test_unknown_matching_mode(gold_doc, schema):
    """Only greedy and optimal matching exist."""
    with pytest.raises(ConfigurationError):
        score_doc(gold_doc, gold_doc, schema, matching="hungarian")


def test_parse_criteria():
    """Presets by name; key=value lists override the defaults."""
    assert parse_criteria("default") == MatchCriteria()
    assert parse_criteria("exact") == MatchCriteria("exact+type", "exact", "subtype+overlap")
    assert parse_criteria("span=exact") == MatchCriteria(span_arg_match="exact")
    with pytest.raises(ConfigurationError):
        parse_criteria("trigger=fuzzy")
    with pytest.raises(ConfigurationError):
        parse_criteria("colour=red")


def test_aggregate_sums_counts():
    """Micro aggregation sums counts; metrics come from the sums."""
    perfect = EvalReport()
    perfect.add("trigger:Drug", tp=1)
    spurious = EvalReport()
    spurious.add("trigger:Drug", fp=1)
    total = aggregate([perfect, spurious])
    assert total.counts["trigger:Drug"] == Counts(1, 1, 0)
    assert total.micro()["micro-trigger"].precision == 0.5

    assert aggregate([perfect]).counts == perfect.counts
    assert aggregate([]).counts == {}


def test_aggregate_is_associative(gold_doc, schema):
    """Grouping of documents does not change the totals."""
    reports = [
        score_doc(gold_doc, gold_doc, schema),
        score_doc(_doc(LIVING), _doc(LIVING + SPURIOUS_TOBACCO), schema),
        score_doc(gold_doc, AnnotationDoc(EXAMPLE_NOTE), schema),
    ]
    flat = aggregate(reports)
    nested = aggregate([aggregate(reports[:2]), reports[2]])
    assert flat.counts == nested.counts


def test_emit_csv_and_json(schema):
    """CSV has a header and one line per row; JSON nests events, subtypes and micro totals."""
    report = score_doc(_doc(LIVING), _doc(LIVING + SPURIOUS_TOBACCO), schema)
    lines = emit_report(report, "csv").splitlines()
    assert lines[0] == "category,TP,FP,FN,P,R,F1"
    assert "micro-trigger,1,1,0,0.5000,1.0000,0.6667" in lines
    assert len(lines) == len(report.rows()) + 1

    data = json.loads(emit_report(report, "json"))
    assert data["events"]["Tobacco"]["trigger"]["fp"] == 1
    assert data["events"]["LivingStatus"]["arguments"]["Type"]["tp"] == 1
    assert data["subtypes"]["Status"]["current"]["tp"] == 1
    assert data["micro"]["trigger"]["precision"] == 0.5


def test_emit_unknown_format():
    """Unsupported formats are rejected by name."""
    with pytest.raises(ScoringError, match="xml"):
        emit_report(EvalReport(), "xml")


def test_score_corpus(tmp_path, schema):
    """Missing predictions score as empty and are listed."""
    gold_dir = tmp_path / "gold"
    pred_dir = tmp_path / "pred"
    gold_dir.mkdir()
    pred_dir.mkdir()
    for name in ("a", "b"):
        (gold_dir / f"{name}.txt").write_text(EXAMPLE_NOTE)
        (gold_dir / f"{name}.ann").write_text(GOLD_STANDOFF)
    (pred_dir / "a.ann").write_text(GOLD_STANDOFF)

    report, missing = score_corpus(gold_dir, pred_dir, schema)
    assert missing == ["b"]
    assert report.micro()["micro-trigger"] == Counts(5, 0, 5)
