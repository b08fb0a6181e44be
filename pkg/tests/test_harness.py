import json
import math

import numpy as np
import pytest

from utils import ValidationError, AudioIOError
from modules.gcfb import CalibrationRef
from modules.metric import GesiParams, SigmoidFit, sigmoid_map
from modules.harness import (
    load_manifest, check_paths,
    rmse_individual, rmse_mean_words, youden_threshold, sentence_si, segment_bounds, segment_words,
    better_ear_score,
    FIT_ON_SUBSET, ItemScore, score_task, score_manifest, select_closed_listeners, group_means,
    fit_on_subset, predict, run_batch, rmse_by_split,
    TABLE_FIELDS, write_table, read_table, sentence_scores,
)
from modules.harness import batch as batch_module
from modules.database_utils import init_db_with_wal, lookup_scores, store_scores, get_db_connection
from conftest import FS, NH_PROFILE, HL_PROFILE, write_profile

FB_SECTION = {"n_channels": 16}
UNIT = GesiParams(rho=0.5, unit_weight_mode=True)
FIT = SigmoidFit(-20.0, 10.0)


def _row(listener, condition, d, i_pred, i_subj, snr=None, split="all", repeat=0, item=0, word=0):
    return {"repeat": repeat, "listener_id": listener, "condition": condition, "snr": snr, "item": item,
            "word": word, "split": split, "d": d, "I_pred": i_pred, "I_subj": i_subj}


def _write_manifest(tmp_path, entries, name="manifest.json"):
    path = tmp_path / name
    path.write_text(json.dumps(entries))
    return path


@pytest.fixture
def scene(tmp_path, wav_writer, speech, rng):
    """Clean and noisy versions of one utterance plus NH and HL profiles on disk."""
    noise = rng.normal(size=speech.size) * math.sqrt(np.mean(speech ** 2))
    wav_writer("clean.wav", speech)
    wav_writer("noisy.wav", speech + noise)
    write_profile(tmp_path / "nh.json", NH_PROFILE)
    write_profile(tmp_path / "hl.json", HL_PROFILE)
    return tmp_path


def _entry(listener, test="clean.wav", condition="Unpro", profile="nh.json", **extra):
    return {"listener_id": listener, "profile": profile, "reference": "clean.wav", "test": test,
            "condition": condition, **extra}


# scoring rules

def test_rmse_individual():
    table = [_row("L1", "A", 0.5, 50.0, 40.0, word=0), _row("L1", "A", 0.6, 70.0, 60.0, word=1)]
    assert rmse_individual(table) == pytest.approx(10.0)
    table.append(_row("L2", "A", 0.5, 30.0, 30.0))
    assert rmse_individual(table) == pytest.approx(5.0)


def test_rmse_mean_words():
    table = [_row("L1", "A", 0.5, 42.5, 50.0), _row("L2", "A", 0.5, 42.5, 35.0)]
    assert rmse_mean_words(table, FIT, 85.0) == pytest.approx(7.5)


def test_rmse_mean_words_maps_the_mean_d():
    # sigmoid(mean d) differs from mean(sigmoid(d)) for words at d 0.5 and 0.9
    target = sigmoid_map(0.7, FIT, 85.0)
    table = [_row("L1", "A", d, sigmoid_map(d, FIT, 85.0), target, word=w) for w, d in enumerate((0.5, 0.9))]
    assert rmse_mean_words(table, FIT, 85.0) == pytest.approx(0.0, abs=1e-9)
    assert rmse_individual(table) > 20.0


def test_rmse_needs_scored_rows():
    with pytest.raises(ValidationError):
        rmse_individual([_row("L1", "A", 0.5, None, None)])


def test_youden_threshold_separable():
    result = youden_threshold([0.2, 0.3, 0.6, 0.8], [0, 0, 1, 1])
    assert result.threshold == pytest.approx(0.6)
    assert result.youden_index == pytest.approx(1.0)
    assert (result.tpr, result.fpr) == (1.0, 0.0)


def test_youden_threshold_ties_go_low():
    result = youden_threshold([0.1, 0.2, 0.3, 0.4], [1, 0, 1, 0])
    assert result.threshold == pytest.approx(0.1)
    assert result.youden_index == pytest.approx(0.0)
    tie = youden_threshold([0.1, 0.4, 0.35, 0.8], [0, 0, 1, 1])
    assert tie.threshold == pytest.approx(0.35)


@pytest.mark.parametrize("seed", range(100))
def test_youden_threshold_matches_brute_force(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 21))
    scores = np.round(rng.uniform(size=n), 1)
    labels = rng.permutation(np.arange(n) < int(rng.integers(1, n)))
    result = youden_threshold(scores, labels)
    best = max(np.mean(scores[labels] >= t) - np.mean(scores[~labels] >= t) for t in np.unique(scores))
    assert result.youden_index == pytest.approx(best)
    assert result.threshold in scores
    assert np.mean(scores[labels] >= result.threshold) - np.mean(scores[~labels] >= result.threshold) \
        == pytest.approx(best)


def test_youden_threshold_errors():
    with pytest.raises(ValidationError):
        youden_threshold([0.1, 0.2], [1, 1])
    with pytest.raises(ValidationError):
        youden_threshold([0.1, 0.2, 0.3], [1, 0])


def test_sentence_si():
    assert sentence_si([0.2, 0.5, 0.7], 0.5) == pytest.approx(66.667, abs=1e-3)
    assert sentence_si([0.1], 0.5) == 0.0
    with pytest.raises(ValidationError):
        sentence_si([], 0.5)


def test_segment_words():
    x = np.arange(FS, dtype=float)
    segments = segment_words(x, FS, [(0.2, 0.4), (0.02, 0.98), (0.5, 0.5)])
    assert [s.size for s in segments] == [4800, FS, 1600]
    assert segments[0][0] == 2400
    assert segments[1][0] == 0.0
    assert segment_bounds(FS, FS, [(0.9, 1.2)]) == [(13600, FS)]
    with pytest.raises(ValidationError, match="inverted"):
        segment_words(x, FS, [(0.4, 0.2)])


def test_better_ear_score():
    assert better_ear_score(0.4, 0.7) == 0.7
    with pytest.raises(ValidationError):
        better_ear_score(float("nan"), 0.7)


# manifest

def test_load_manifest(scene):
    path = _write_manifest(scene, {"entries": [
        _entry("L1", snr=-3, subjective_si=55, word_spans=[[0.1, 0.4]], f0="f0.csv"),
        _entry("L2", binaural=True),
    ]})
    manifest = load_manifest(path)
    assert len(manifest) == 2
    first = manifest.entries[0]
    assert first.reference == scene / "clean.wav"
    assert (first.snr, first.subjective_si, first.word_spans) == (-3.0, 55.0, ((0.1, 0.4),))
    assert first.group == ("L1", "Unpro", -3.0)
    assert manifest.entries[1].binaural
    assert manifest.listeners == ["L1", "L2"]
    with pytest.raises(AudioIOError, match="f0.csv"):
        check_paths(manifest)


@pytest.mark.parametrize("entry, message", [
    ({"listener_id": "L1", "profile": "nh.json", "reference": "clean.wav", "test": "clean.wav"}, "condition"),
    (_entry("L1", subjective_si=120), "subjective_si"),
    (_entry("L1", word_spans=[[0.4, 0.2]]), "inverted"),
    (_entry("L1", snr="loud"), "snr"),
])
def test_load_manifest_rejects_bad_entries(scene, entry, message):
    with pytest.raises(ValidationError, match=message):
        load_manifest(_write_manifest(scene, [entry]))


def test_load_manifest_file_errors(tmp_path):
    with pytest.raises(AudioIOError):
        load_manifest(tmp_path / "missing.json")
    bad = tmp_path / "bad.json"
    bad.write_text("[{")
    with pytest.raises(ValidationError):
        load_manifest(bad)


# batch scoring

def test_run_batch_fixed_fit(scene):
    manifest = load_manifest(_write_manifest(scene, [_entry("L1", snr=0)]))
    result = run_batch(manifest, UNIT, FIT, fb_section=FB_SECTION)
    assert len(result.table) == 1
    row = result.table[0]
    assert row["d"] == pytest.approx(1.0, abs=1e-6)
    assert row["I_pred"] == pytest.approx(84.996, abs=1e-3)
    assert row["split"] == "all"
    assert row["I_subj"] is None
    assert result.fits == {0: FIT}


def test_run_batch_word_spans_and_binaural(scene, wav_writer, speech):
    wav_writer("stereo_ref.wav", np.stack([speech, speech], axis=1))
    wav_writer("stereo_test.wav", np.stack([speech, 0.3 * speech], axis=1))
    manifest = load_manifest(_write_manifest(scene, [
        _entry("L1", word_spans=[[0.15, 0.5], [0.8, 1.1]]),
        {**_entry("L2", binaural=True), "reference": "stereo_ref.wav", "test": "stereo_test.wav"},
    ]))
    table = run_batch(manifest, UNIT, FIT, fb_section=FB_SECTION).table
    assert [(r["listener_id"], r["word"]) for r in table] == [("L1", 0), ("L1", 1), ("L2", 0)]
    for row in table:
        assert row["d"] == pytest.approx(1.0, abs=1e-6)


def test_run_batch_empty_manifest(tmp_path):
    manifest = load_manifest(_write_manifest(tmp_path, []))
    result = run_batch(manifest, UNIT, FIT_ON_SUBSET)
    assert result.table == []
    assert result.fits == {}


def test_run_batch_rejects_unknown_fit(scene):
    manifest = load_manifest(_write_manifest(scene, [_entry("L1")]))
    with pytest.raises(ValidationError):
        run_batch(manifest, UNIT, "best", fb_section=FB_SECTION)


def _subset_manifest(scene):
    entries = []
    for listener in ("L1", "L2", "L3"):
        entries.append(_entry(listener, "clean.wav", "Unpro", subjective_si=80))
        entries.append(_entry(listener, "noisy.wav", "Noisy", subjective_si=30))
    return load_manifest(_write_manifest(scene, entries))


def test_run_batch_fit_on_subset(scene):
    manifest = _subset_manifest(scene)
    result = run_batch(manifest, UNIT, FIT_ON_SUBSET, fb_section=FB_SECTION, fit_subset=2, seed=1, repeats=2)
    assert sorted(result.fits) == [0, 1]
    assert len(result.table) == 12
    for repeat, closed in result.closed_listeners.items():
        assert len(closed) == 2
        assert closed == select_closed_listeners(["L1", "L2", "L3"], 2, 1 + repeat)
        rows = [r for r in result.table if r["repeat"] == repeat]
        assert {r["listener_id"] for r in rows if r["split"] == "closed"} == set(closed)
        assert len([r for r in rows if r["split"] == "open"]) == 2
    clean = next(r for r in result.table if r["condition"] == "Unpro")
    noisy = next(r for r in result.table if r["condition"] == "Noisy")
    assert clean["d"] > noisy["d"]
    assert clean["I_pred"] == pytest.approx(80.0, abs=0.01)
    assert noisy["I_pred"] == pytest.approx(30.0, abs=0.01)

    summary = rmse_by_split(result.table, result.fits, 85.0)
    all_rows = [s for s in summary if s["condition"] == "ALL"]
    assert {(s["repeat"], s["split"]) for s in all_rows} == {(0, "closed"), (0, "open"), (1, "closed"), (1, "open")}
    for s in summary:
        assert s["rmse_mean_words"] == pytest.approx(0.0, abs=0.01)


def test_run_batch_fit_on_subset_needs_subjective_scores(scene):
    manifest = load_manifest(_write_manifest(scene, [_entry("L1"), _entry("L2", "noisy.wav")]))
    with pytest.raises(ValidationError, match="subjective"):
        run_batch(manifest, UNIT, FIT_ON_SUBSET, fb_section=FB_SECTION)


def test_select_closed_listeners():
    pool = ["L%02d" % i for i in range(10)]
    chosen = select_closed_listeners(pool, 4, seed=3)
    assert chosen == sorted(chosen)
    assert len(set(chosen)) == 4 and set(chosen) <= set(pool)
    assert chosen == select_closed_listeners(list(reversed(pool)), 4, seed=3)
    assert select_closed_listeners(pool, 12, seed=3) == pool
    with pytest.raises(ValidationError):
        select_closed_listeners(pool, 0, seed=3)


def test_group_means_and_predict():
    scores = [
        ItemScore("L1", "A", None, 0, 0, 0.4, 50.0),
        ItemScore("L1", "A", None, 0, 1, 0.6, 50.0),
        ItemScore("L1", "B", None, 1, 0, 0.2, None),
    ]
    means = group_means(scores)
    assert means[("L1", "A", None)] == pytest.approx((0.5, 50.0))
    assert means[("L1", "B", None)] == (0.2, None)
    rows = predict(scores, FIT, ["L1"], 85.0, repeat=2)
    assert [r["split"] for r in rows] == ["closed"] * 3
    assert rows[0]["I_pred"] == pytest.approx(sigmoid_map(0.4, FIT, 85.0))
    assert rows[2]["I_subj"] is None
    assert all(r["repeat"] == 2 for r in rows)
    with pytest.raises(ValidationError):
        fit_on_subset(scores, ["L9"], 85.0)
    with pytest.raises(ValidationError, match="subjective"):
        fit_on_subset(scores, ["L1"], 85.0, condition="B")


def test_score_task_reports_errors(scene):
    manifest = load_manifest(_write_manifest(scene, [
        _entry("L1", profile="missing.json"),
        _entry("L2", profile="bad.json"),
    ]))
    write_profile(scene / "bad.json", {**NH_PROFILE, "alpha": 2.0})
    task = {"params": UNIT, "calib": CalibrationRef(), "fb_section": FB_SECTION}
    io = score_task({**task, "index": 0, "entry": manifest.entries[0]})
    assert io["kind"] == "io" and io["index"] == 0
    invalid = score_task({**task, "index": 1, "entry": manifest.entries[1]})
    assert invalid["kind"] == "validation"
    assert "alpha" in invalid["error"]


def test_score_manifest_raises_for_failed_entries(scene, wav_writer, speech):
    wav_writer("stereo.wav", np.stack([speech, speech], axis=1))
    manifest = load_manifest(_write_manifest(scene, [
        _entry("L1"),
        {**_entry("L2"), "reference": "stereo.wav", "test": "stereo.wav"},
    ]))
    with pytest.raises(ValidationError, match="entry 1"):
        score_manifest(manifest, UNIT, fb_section=FB_SECTION)
    missing = load_manifest(_write_manifest(scene, [_entry("L1", test="nope.wav")], "m2.json"))
    with pytest.raises(AudioIOError):
        score_manifest(missing, UNIT, fb_section=FB_SECTION)


def test_score_manifest_uses_cache(scene, monkeypatch):
    manifest = load_manifest(_write_manifest(scene, [_entry("L1"), _entry("L2", "noisy.wav")]))
    db = scene / "cache" / "scores.db"
    first = score_manifest(manifest, UNIT, fb_section=FB_SECTION, db_path=db)
    assert db.exists()

    def fail(task):
        raise RuntimeError("scored again")

    monkeypatch.setattr(batch_module, "score_task", fail)
    assert score_manifest(manifest, UNIT, fb_section=FB_SECTION, db_path=db) == first
    with pytest.raises(RuntimeError, match="scored again"):
        score_manifest(manifest, GesiParams(rho=0.6, unit_weight_mode=True), fb_section=FB_SECTION, db_path=db)


def test_score_cache_store_and_lookup(tmp_path):
    db = tmp_path / "cache" / "scores.db"
    assert lookup_scores(db, "k") is None
    init_db_with_wal(db)
    store_scores(db, "k", [0.25, np.float64(1.0) / 3.0])
    assert lookup_scores(db, "k") == [0.25, 1.0 / 3.0]
    assert lookup_scores(db, "other") is None
    store_scores(db, "k", [0.5])
    assert lookup_scores(db, "k") == [0.5]


def test_score_cache_rejects_incomplete_rows(tmp_path):
    db = tmp_path / "scores.db"
    init_db_with_wal(db)
    store_scores(db, "k", [0.1, 0.2])
    with get_db_connection(db) as conn:
        conn.execute("UPDATE score_cache SET n_scores = 3 WHERE cache_key = 'k'")
    assert lookup_scores(db, "k") is None


def test_score_cache_rolls_back_failed_block(tmp_path):
    db = tmp_path / "scores.db"
    init_db_with_wal(db)
    store_scores(db, "k", [0.1])
    with pytest.raises(RuntimeError):
        with get_db_connection(db) as conn:
            conn.execute("DELETE FROM score_cache")
            raise RuntimeError("abort")
    assert lookup_scores(db, "k") == [0.1]


# reports

def test_write_and_read_table(tmp_path):
    rows = [
        _row("L1", "A", 0.5, 42.5, 40.0, snr=-3.0, split="closed"),
        _row("L1", "A", 1.0 / 3.0, None, None, split="open", word=1),
    ]
    write_table(rows, tmp_path / "a.csv")
    write_table(rows, tmp_path / "b.csv")
    text = (tmp_path / "a.csv").read_text()
    assert text == (tmp_path / "b.csv").read_text()
    assert text.splitlines()[0] == ",".join(TABLE_FIELDS)
    assert "0.3333333333" in text
    loaded = read_table(tmp_path / "a.csv")
    assert loaded[0]["snr"] == -3.0
    assert loaded[1]["I_pred"] is None
    assert loaded[1]["word"] == 1
    with pytest.raises(AudioIOError):
        read_table(tmp_path / "missing.csv")


def test_rmse_by_split():
    table = [
        _row("L1", "A", 0.5, 42.5, 40.0, split="closed"),
        _row("L1", "B", 0.5, 42.5, 45.0, split="closed"),
        _row("L2", "A", 0.5, 42.5, 42.5, split="open"),
        _row("L3", "A", 0.5, 42.5, None, split="open"),
    ]
    summary = rmse_by_split(table, {0: FIT}, 85.0)
    keys = [(s["split"], s["condition"]) for s in summary]
    assert keys == [("closed", "A"), ("closed", "B"), ("closed", "ALL"), ("open", "A"), ("open", "ALL")]
    closed_all = summary[2]
    assert closed_all["n_groups"] == 2
    assert closed_all["rmse_individual"] == pytest.approx(2.5)
    assert closed_all["rmse_mean_words"] == pytest.approx(2.5)
    assert summary[4]["rmse_individual"] == pytest.approx(0.0)
    assert rmse_by_split(table, {}, 85.0) == []


# sentences

SCORES = [
    {"sentence": "s1", "word": "0", "d": "0.2"},
    {"sentence": "s1", "word": "1", "d": "0.6"},
    {"sentence": "s1", "word": "2", "d": "0.8"},
    {"sentence": "s2", "word": "0", "d": "0.1"},
    {"sentence": "s2", "word": "1", "d": "0.7"},
]


def test_sentence_scores_from_labels():
    labels = [{**r, "hit": "1" if float(r["d"]) >= 0.6 else "0"} for r in SCORES]
    threshold, youden, rows = sentence_scores(SCORES, labels)
    assert threshold == pytest.approx(0.6)
    assert youden.youden_index == pytest.approx(1.0)
    assert [(r["sentence"], r["hits"], r["n_words"]) for r in rows] == [("s1", 2, 3), ("s2", 1, 2)]
    assert rows[0]["si"] == pytest.approx(66.667, abs=1e-3)


def test_sentence_scores_fixed_threshold():
    threshold, youden, rows = sentence_scores(SCORES, threshold=0.15)
    assert youden is None
    assert [r["si"] for r in rows] == [100.0, 50.0]


def test_sentence_scores_errors():
    with pytest.raises(ValidationError, match="threshold"):
        sentence_scores(SCORES)
    with pytest.raises(ValidationError, match="no score"):
        sentence_scores(SCORES, [{"sentence": "s3", "word": "0", "hit": "1"}])
    with pytest.raises(ValidationError, match="hit"):
        sentence_scores(SCORES, [{**SCORES[0], "hit": "maybe"}])
