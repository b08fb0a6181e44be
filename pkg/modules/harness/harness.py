import argparse
import csv
from collections import defaultdict
from pathlib import Path

import utils  # Import from root directory
from utils import ValidationError, AudioIOError
from modules.gcfb import CalibrationRef
from modules.metric import GesiParams
from modules.metric.metric import parse_fit
from .manifest import load_manifest
from .batch import FIT_ON_SUBSET, run_batch, rmse_by_split
from .report import write_table, write_summary
from .scoring import youden_threshold, sentence_si
from ..logo_utils import print_evaluate_logo, print_sentence_logo

SENTENCE_FIELDS = ['sentence', 'n_words', 'hits', 'si']


def evaluate(args):
    """Handle the evaluate command."""
    if not (args.manifest and args.out):
        print_evaluate_logo()
        print("\nAvailable options for 'evaluate' command:")
        print("-" * 50)
        print("Usage: gesi.py evaluate --manifest M.json --out report.csv [options]")
        print("\nOptions:")
        print("  --fit=A,B           Fixed sigmoid parameters (use = for negative values)")
        print("  --fit-subset N      Fit on N seeded listeners, predict the rest")
        print("  --seed S            Seed of the first closed-subset draw (default 1)")
        print("  --repeats R         Number of closed-subset draws (seeds S .. S+R-1)")
        print("  --fit-condition C   Fit only on this condition (e.g. Unpro)")
        print("  --summary FILE      Write RMS errors per repeat/split/condition")
        print("  --workers N         Worker processes")
        print("  --no-db             Do not use the result cache")
        print("  --rho/--eta/--hmax/--calib-spl/--unit-weights/--no-tmtf as for compute")
        print("\nExample usage:")
        print("  gesi.py evaluate --manifest listeners.json --fit-subset 5 --repeats 10 --out report.csv")
        print("  gesi.py evaluate --manifest listeners.json --fit=-20,10 --out report.csv")
        return

    config = utils.load_config()
    section = config.get("evaluate", {})
    params = GesiParams.from_config(
        config.get("gesi", {}),
        rho=args.rho, eta=args.eta, h_max=args.hmax,
        unit_weight_mode=True if args.unit_weights else None,
        use_tmtf=False if args.no_tmtf else None,
    )
    spl = args.calib_spl if args.calib_spl is not None else config["gesi"].get("calib_spl", 120.0)

    if args.fit and args.fit_subset:
        raise ValidationError("--fit and --fit-subset are mutually exclusive")
    fit = parse_fit(args.fit)
    if args.fit_subset is not None:
        fit = FIT_ON_SUBSET
    fit_subset = args.fit_subset if args.fit_subset is not None else int(section.get("fit_subset", 5))
    workers = getattr(args, "workers", None) or int(section.get("workers", 4))
    db_path = None if args.no_db else utils.cache_dir(config) / "gesi_scores.db"

    manifest = load_manifest(args.manifest)
    utils.info(f"{len(manifest)} entries, {len(manifest.listeners)} listeners in {args.manifest}")

    result = run_batch(
        manifest, params, fit,
        calib=CalibrationRef(spl_at_unit_rms=spl),
        fb_section=config.get("filterbank"),
        fit_subset=fit_subset,
        seed=args.seed if args.seed is not None else int(section.get("seed", 1)),
        repeats=args.repeats if args.repeats is not None else int(section.get("repeats", 1)),
        fit_condition=args.fit_condition or section.get("fit_condition"),
        workers=workers,
        db_path=db_path,
    )

    write_table(result.table, args.out)
    utils.info(f"{len(result.table)} rows written to {args.out}")
    for repeat, repeat_fit in sorted(result.fits.items()):
        closed = result.closed_listeners.get(repeat)
        subset = f" (closed: {', '.join(closed)})" if closed else ""
        print(f"repeat {repeat}: a={repeat_fit.a:.6f} b={repeat_fit.b:.6f}{subset}")

    if args.summary:
        if not result.fits:
            utils.warn("no sigmoid fit, summary not written")
            return
        summary = rmse_by_split(result.table, result.fits, params.i_max)
        write_summary(summary, args.summary)
        for row in summary:
            if row["condition"] == "ALL":
                print(f"repeat {row['repeat']} {row['split']}: "
                      f"RMSE individual {row['rmse_individual']:.2f}, "
                      f"mean words {row['rmse_mean_words']:.2f}")
        utils.info(f"Summary written to {args.summary}")


def _read_csv(path, required: set) -> list:
    path = Path(path)
    try:
        with open(path, 'r', newline='') as f:
            reader = csv.DictReader(f)
            missing = required - set(reader.fieldnames or [])
            if missing:
                raise ValidationError(f"{path}: missing columns {sorted(missing)}")
            return list(reader)
    except FileNotFoundError:
        raise AudioIOError(f"file not found: {path}")


def _parse_hit(value: str, where: str) -> bool:
    value = value.strip().lower()
    if value in ("1", "true", "hit", "yes"):
        return True
    if value in ("0", "false", "miss", "no"):
        return False
    raise ValidationError(f"{where}: hit must be 0/1, got {value!r}")


def sentence_scores(scores_rows, labels_rows=None, threshold: float = None):
    """Per-sentence correctness; the threshold comes from the labels when not given.

    Returns (threshold, youden result or None, rows).
    """
    words = {}
    try:
        for n, r in enumerate(scores_rows):
            words[(r["sentence"], int(r["word"]))] = float(r["d"])
    except ValueError as e:
        raise ValidationError(f"scores row {n + 1}: {e}")
    if not words:
        raise ValidationError("no word scores given")

    youden = None
    if threshold is None:
        if not labels_rows:
            raise ValidationError("a threshold or a labels table is needed")
        scores, labels = [], []
        for n, r in enumerate(labels_rows):
            key = (r["sentence"], int(r["word"]))
            if key not in words:
                raise ValidationError(f"labels row {n + 1}: no score for sentence {key[0]} word {key[1]}")
            scores.append(words[key])
            labels.append(_parse_hit(r["hit"], f"labels row {n + 1}"))
        youden = youden_threshold(scores, labels)
        threshold = youden.threshold

    by_sentence = defaultdict(list)
    for (sentence, word), d in sorted(words.items()):
        by_sentence[sentence].append(d)
    rows = []
    for sentence in sorted(by_sentence):
        values = by_sentence[sentence]
        rows.append({
            "sentence": sentence,
            "n_words": len(values),
            "hits": sum(1 for d in values if d >= threshold),
            "si": sentence_si(values, threshold),
        })
    return threshold, youden, rows


def sentence_command(args):
    """Handle the sentence command."""
    if not args.scores or (args.labels is None and args.threshold is None):
        print_sentence_logo()
        print("\nAvailable options for 'sentence' command:")
        print("-" * 50)
        print("Usage: gesi.py sentence --scores scores.csv (--labels labels.csv | --threshold D) [--out FILE]")
        print("\nOptions:")
        print("  --scores FILE     CSV 'sentence,word,d' of word scores")
        print("  --labels FILE     CSV 'sentence,word,hit' used to pick the Youden threshold")
        print("  --threshold D     Fixed word threshold instead of --labels")
        print("  --out FILE        Write per-sentence correctness as CSV")
        print("\nExample usage:")
        print("  gesi.py sentence --scores words.csv --labels hits.csv --out sentences.csv")
        return

    scores_rows = _read_csv(args.scores, {"sentence", "word", "d"})
    labels_rows = _read_csv(args.labels, {"sentence", "word", "hit"}) if args.labels else None
    threshold, youden, rows = sentence_scores(scores_rows, labels_rows, args.threshold)

    print(f"threshold: {threshold:.6f}")
    if youden is not None:
        print(f"youden: {youden.youden_index:.6f} (tpr {youden.tpr:.3f}, fpr {youden.fpr:.3f})")
    for row in rows:
        print(f"{row['sentence']}: {row['si']:.3f}% ({row['hits']}/{row['n_words']})")

    if args.out:
        with open(args.out, 'w', newline='') as f:
            writer = csv.DictWriter(f, fieldnames=SENTENCE_FIELDS, lineterminator='\n')
            writer.writeheader()
            for row in rows:
                writer.writerow({**row, "si": f"{row['si']:.10g}"})
        utils.info(f"Sentence scores written to {args.out}")


def register_command(subparsers):
    """Register the 'evaluate' and 'sentence' commands with the subparsers."""
    evaluate_parser = subparsers.add_parser("evaluate", help="Score a manifest and report prediction errors")
    evaluate_parser.add_argument("--manifest", type=utils.file_path, help="Manifest JSON file")
    evaluate_parser.add_argument("--out", help="Prediction table CSV")
    evaluate_parser.add_argument("--summary", help="RMS error summary CSV")
    evaluate_parser.add_argument("--fit", type=utils.float_list, help="Fixed sigmoid parameters 'a,b'")
    evaluate_parser.add_argument("--fit-subset", type=int, help="Number of closed-subset listeners")
    evaluate_parser.add_argument("--seed", type=int, help="Seed of the first closed-subset draw")
    evaluate_parser.add_argument("--repeats", type=int, help="Number of closed-subset draws")
    evaluate_parser.add_argument("--fit-condition", help="Condition used for fitting")
    # SUPPRESS keeps the global --workers value when this one is not given
    evaluate_parser.add_argument("--workers", type=int, default=argparse.SUPPRESS, help="Worker processes")
    evaluate_parser.add_argument("--no-db", action="store_true", help="Do not use the result cache")
    evaluate_parser.add_argument("--rho", type=float, help="Level asymmetry exponent")
    evaluate_parser.add_argument("--eta", type=float, help="Channel efficiency exponent")
    evaluate_parser.add_argument("--hmax", type=float, help="SSI weight boundary h_max")
    evaluate_parser.add_argument("--calib-spl", type=float, help="dB SPL of a digital RMS of 1")
    evaluate_parser.add_argument("--unit-weights", action="store_true", help="Disable SSI and efficiency weights")
    evaluate_parser.add_argument("--no-tmtf", action="store_true", help="Use NH modulation gains for the test")
    evaluate_parser.set_defaults(func=evaluate)

    sentence_parser = subparsers.add_parser("sentence", help="Sentence correctness from word scores")
    sentence_parser.add_argument("--scores", type=utils.file_path, help="Word scores CSV ('sentence,word,d')")
    sentence_parser.add_argument("--labels", type=utils.file_path, help="Word hits CSV ('sentence,word,hit')")
    sentence_parser.add_argument("--threshold", type=float, help="Fixed word threshold")
    sentence_parser.add_argument("--out", help="Per-sentence CSV output")
    sentence_parser.set_defaults(func=sentence_command)
