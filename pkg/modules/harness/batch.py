"""Manifest scoring, closed-subset sigmoid fitting and prediction tables."""
import concurrent.futures
from collections import defaultdict
from dataclasses import dataclass, field, asdict
from pathlib import Path
from typing import Optional

import numpy as np
from tqdm import tqdm

import utils
from utils import ValidationError, AudioIOError
from modules.audio_io import read_audio, read_audio_channels
from modules.profile import LEFT, RIGHT, load_profile
from modules.gcfb import CalibrationRef, FilterbankConfig, FRAME_SHIFT
from modules.metric import (
    GesiParams, SigmoidFit, F0Track, compute_gesi, fit_sigmoid, sigmoid_map,
    load_f0_track, n_epgram_frames,
)
from ..database_utils import init_db_with_wal, cache_key, lookup_scores, store_scores
from .manifest import EvaluationManifest, ManifestEntry, check_paths
from .scoring import segment_bounds, better_ear_score, rmse_individual, rmse_mean_words

FIT_ON_SUBSET = "fit-on-subset"
SPLIT_CLOSED = "closed"
SPLIT_OPEN = "open"
SPLIT_ALL = "all"


@dataclass(frozen=True)
class ItemScore:
    listener_id: str
    condition: str
    snr: Optional[float]
    item: int
    word: int
    d: float
    subjective_si: Optional[float] = None

    @property
    def group(self) -> tuple:
        return (self.listener_id, self.condition, self.snr)


def _snr_key(snr):
    return (snr is None, snr if snr is not None else 0.0)


def item_sort_key(score: ItemScore) -> tuple:
    return (score.listener_id, score.condition, _snr_key(score.snr), score.item, score.word)


def _segment_f0(full: F0Track, start_sample: int, n_samples: int, sample_rate: int) -> F0Track:
    start = int(round(start_sample / (sample_rate * FRAME_SHIFT)))
    n = n_epgram_frames(n_samples, sample_rate)
    values = full.values[start:start + n]
    if values.size < n:
        values = np.concatenate([values, np.full(n - values.size, full.epsilon)])
    return F0Track(values=values, epsilon=full.epsilon)


def score_entry_words(entry: ManifestEntry, params: GesiParams, calib: CalibrationRef,
                      fb_section: dict) -> list:
    """d per word of one entry (one value when the entry has no word spans)."""
    profile = load_profile(entry.profile)
    if entry.binaural:
        ref2, fs = read_audio_channels(entry.reference)
        test2, fs_test = read_audio_channels(entry.test)
        if ref2.shape[1] < 2 or test2.shape[1] < 2:
            raise ValidationError(f"binaural entry needs stereo files: {entry.reference}, {entry.test}")
        sides = [(LEFT, ref2[:, 0], test2[:, 0]), (RIGHT, ref2[:, 1], test2[:, 1])]
    else:
        ref, fs = read_audio(entry.reference, entry.channel)
        test, fs_test = read_audio(entry.test, entry.channel)
        sides = [(None, ref, test)]
    if fs != fs_test:
        raise ValidationError(f"{entry.reference} is {fs} Hz but {entry.test} is {fs_test} Hz")

    n_samples = sides[0][1].size
    fb_config = FilterbankConfig.from_config(fb_section, fs)
    full_f0 = None
    if entry.f0 is not None:
        full_f0 = load_f0_track(entry.f0, n_epgram_frames(n_samples, fs), params.f0_epsilon)

    spans = segment_bounds(n_samples, fs, entry.word_spans) if entry.word_spans else [(0, n_samples)]
    scores = []
    for lo, hi in spans:
        f0 = _segment_f0(full_f0, lo, hi - lo, fs) if full_f0 is not None else None
        per_ear = [compute_gesi(ref_x[lo:hi], test_x[lo:hi], fs, profile, params, calib,
                                fb_config=fb_config, f0=f0, ear=ear).d
                   for ear, ref_x, test_x in sides]
        scores.append(better_ear_score(*per_ear) if entry.binaural else per_ear[0])
    return scores


def score_task(task: dict) -> dict:
    """Worker: never raises, returns the scores or an 'error' entry."""
    try:
        scores = score_entry_words(task["entry"], task["params"], task["calib"], task["fb_section"])
        return {"index": task["index"], "scores": scores}
    except OSError as e:
        return {"index": task["index"], "error": str(e), "kind": "io"}
    except Exception as e:
        return {"index": task["index"], "error": str(e), "kind": "validation"}


def _entry_cache_key(entry: ManifestEntry, params: GesiParams, calib: CalibrationRef, fb_section: dict) -> str:
    settings = {
        "params": asdict(params),
        "calib": calib.spl_at_unit_rms,
        "filterbank": fb_section or {},
        "word_spans": entry.word_spans,
        "binaural": entry.binaural,
        "channel": entry.channel,
    }
    return cache_key([entry.profile, entry.reference, entry.test, entry.f0], settings)


def score_manifest(manifest: EvaluationManifest, params: GesiParams,
                   calib: CalibrationRef = CalibrationRef(), fb_section: dict = None,
                   workers: int = 1, db_path: Path = None) -> list:
    """Score every entry (per word when spans exist), using the result cache when given."""
    check_paths(manifest)
    results = {}
    keys = {}
    tasks = []
    if db_path is not None:
        init_db_with_wal(db_path)
    for i, entry in enumerate(manifest.entries):
        if db_path is not None:
            keys[i] = _entry_cache_key(entry, params, calib, fb_section)
            cached = lookup_scores(db_path, keys[i])
            if cached is not None:
                results[i] = cached
                continue
        tasks.append({"index": i, "entry": entry, "params": params, "calib": calib, "fb_section": fb_section})

    if results:
        utils.info(f"{len(results)} of {len(manifest)} entries taken from the cache")

    failures = []
    if tasks:
        if workers <= 1:
            outcomes = (score_task(t) for t in tasks)
            for outcome in tqdm(outcomes, total=len(tasks), desc="Scoring entries"):
                failures += _collect(outcome, results)
        else:
            with concurrent.futures.ProcessPoolExecutor(max_workers=workers) as executor:
                futures = [executor.submit(score_task, t) for t in tasks]
                for future in tqdm(concurrent.futures.as_completed(futures), total=len(futures),
                                   desc="Scoring entries"):
                    failures += _collect(future.result(), results)

    if failures:
        failures.sort(key=lambda f: f["index"])
        for f in failures:
            utils.error(f"entry {f['index']}: {f['error']}")
        first = failures[0]
        exc = AudioIOError if first["kind"] == "io" else ValidationError
        raise exc(f"{len(failures)} manifest entries failed; first: entry {first['index']}: {first['error']}")

    if db_path is not None:
        for task in tasks:
            store_scores(db_path, keys[task["index"]], results[task["index"]])

    scores = []
    for i, entry in enumerate(manifest.entries):
        for word, d in enumerate(results[i]):
            scores.append(ItemScore(listener_id=entry.listener_id, condition=entry.condition, snr=entry.snr,
                                    item=i, word=word, d=float(d), subjective_si=entry.subjective_si))
    return sorted(scores, key=item_sort_key)


def _collect(outcome: dict, results: dict) -> list:
    if "error" in outcome:
        return [outcome]
    results[outcome["index"]] = outcome["scores"]
    return []


def select_closed_listeners(listeners, size: int, seed: int) -> list:
    """Seeded choice of `size` listeners for fitting; all of them when size covers the pool."""
    pool = sorted(set(listeners))
    if size <= 0:
        raise ValidationError(f"fit subset size must be positive, got {size}")
    if size >= len(pool):
        return pool
    rng = np.random.default_rng(seed)
    return sorted(rng.choice(pool, size=size, replace=False).tolist())


def group_means(scores) -> dict:
    """(mean d, mean subjective or None) per (listener, condition, snr)."""
    groups = defaultdict(list)
    for s in scores:
        groups[s.group].append(s)
    means = {}
    for key, items in groups.items():
        subj = [s.subjective_si for s in items if s.subjective_si is not None]
        means[key] = (float(np.mean([s.d for s in items])), float(np.mean(subj)) if subj else None)
    return means


def fit_on_subset(scores, closed_listeners, i_max: float, condition: str = None) -> SigmoidFit:
    """Fit the sigmoid on group-mean d against subjective SI of the closed listeners."""
    closed = set(closed_listeners)
    subset = [s for s in scores
              if s.listener_id in closed and (condition is None or s.condition == condition)]
    if not subset:
        raise ValidationError(f"closed subset has no items (listeners {sorted(closed)}, condition {condition})")
    missing = [s for s in subset if s.subjective_si is None]
    if missing:
        raise ValidationError(
            f"fit-on-subset needs subjective scores; {len(missing)} closed-subset items have none")
    means = group_means(subset)
    pairs = [means[k] for k in sorted(means, key=lambda k: (k[0], k[1], _snr_key(k[2])))]
    return fit_sigmoid(pairs, i_max)


def predict(scores, fit: Optional[SigmoidFit], closed_listeners, i_max: float, repeat: int = 0) -> list:
    """Prediction rows; I_subj is the subjective mean of the row's group."""
    means = group_means(scores)
    closed = set(closed_listeners) if closed_listeners is not None else None
    rows = []
    for s in scores:
        if closed is None:
            split = SPLIT_ALL
        else:
            split = SPLIT_CLOSED if s.listener_id in closed else SPLIT_OPEN
        rows.append({
            "repeat": repeat,
            "listener_id": s.listener_id,
            "condition": s.condition,
            "snr": s.snr,
            "item": s.item,
            "word": s.word,
            "split": split,
            "d": s.d,
            "I_pred": sigmoid_map(s.d, fit, i_max) if fit is not None else None,
            "I_subj": means[s.group][1],
        })
    return rows


def table_sort_key(row: dict) -> tuple:
    return (row["repeat"], row["listener_id"], row["condition"], _snr_key(row["snr"]), row["item"], row["word"])


@dataclass
class BatchResult:
    table: list
    fits: dict = field(default_factory=dict)             # repeat -> SigmoidFit
    closed_listeners: dict = field(default_factory=dict)  # repeat -> list


def run_batch(manifest: EvaluationManifest, params: GesiParams, fit=None, *,
              calib: CalibrationRef = CalibrationRef(), fb_section: dict = None,
              fit_subset: int = 5, seed: int = 1, repeats: int = 1, fit_condition: str = None,
              workers: int = 1, db_path: Path = None) -> BatchResult:
    """Score a manifest and map d to percent with a fixed fit or a closed-subset fit.

    With fit=FIT_ON_SUBSET the fit is repeated with seeds seed .. seed+repeats-1.
    """
    if fit is not None and fit != FIT_ON_SUBSET and not isinstance(fit, SigmoidFit):
        raise ValidationError(f"fit must be a SigmoidFit or '{FIT_ON_SUBSET}', got {fit!r}")
    scores = score_manifest(manifest, params, calib, fb_section, workers, db_path)
    result = BatchResult(table=[])
    if not scores:
        return result

    if isinstance(fit, SigmoidFit):
        result.table = predict(scores, fit, None, params.i_max)
        result.fits[0] = fit
    elif fit == FIT_ON_SUBSET:
        listeners = sorted({s.listener_id for s in scores})
        for r in range(repeats):
            closed = select_closed_listeners(listeners, fit_subset, seed + r)
            repeat_fit = fit_on_subset(scores, closed, params.i_max, fit_condition)
            result.fits[r] = repeat_fit
            result.closed_listeners[r] = closed
            result.table += predict(scores, repeat_fit, closed, params.i_max, repeat=r)
    else:
        result.table = predict(scores, None, None, params.i_max)

    result.table.sort(key=table_sort_key)
    return result


def rmse_by_split(table, fits: dict, i_max: float) -> list:
    """Both RMS errors per (repeat, split, condition), plus an 'ALL' condition row."""
    summary = []
    for repeat in sorted({r["repeat"] for r in table}):
        fit = fits.get(repeat)
        if fit is None:
            continue
        rows = [r for r in table if r["repeat"] == repeat and r["I_subj"] is not None]
        for split in sorted({r["split"] for r in rows}):
            split_rows = [r for r in rows if r["split"] == split]
            conditions = sorted({r["condition"] for r in split_rows}) + ["ALL"]
            for condition in conditions:
                subset = split_rows if condition == "ALL" else [r for r in split_rows if r["condition"] == condition]
                if not subset:
                    continue
                summary.append({
                    "repeat": repeat,
                    "split": split,
                    "condition": condition,
                    "n_groups": len({(r["listener_id"], r["condition"], r["snr"]) for r in subset}),
                    "rmse_individual": rmse_individual(subset),
                    "rmse_mean_words": rmse_mean_words(subset, fit, i_max),
                })
    return summary
