import csv
from collections import defaultdict
from pathlib import Path

import utils  # Import from root directory
from utils import ValidationError, AudioIOError
from modules.audio_io import read_audio
from modules.profile import load_profile
from modules.gcfb import CalibrationRef, FilterbankConfig
from .params import GesiParams, SigmoidFit
from .f0 import load_f0_track, n_epgram_frames
from .core import compute_gesi, result_to_row, write_diagnostics, RESULT_FIELDS
from .sigmoid import fit_sigmoid
from ..logo_utils import print_compute_logo, print_fit_sigmoid_logo


def parse_fit(values) -> SigmoidFit:
    if values is None:
        return None
    if len(values) != 2:
        raise ValidationError(f"--fit takes two numbers 'a,b', got {values}")
    return SigmoidFit(a=values[0], b=values[1])


def compute(args):
    """Handle the compute command."""
    if not (args.ref and args.test and args.profile):
        print_compute_logo()
        print("\nAvailable options for 'compute' command:")
        print("-" * 50)
        print("Usage: gesi.py compute --ref R.wav --test T.wav --profile P.json [options]")
        print("\nOptions:")
        print("  --rho R            Level asymmetry exponent (default 0.55)")
        print("  --eta E            Channel efficiency exponent (default 0.7)")
        print("  --hmax H           SSI weight boundary (default 5)")
        print("  --calib-spl DB     dB SPL of a digital RMS of 1 (default 120)")
        print("  --unit-weights     Disable SSI and efficiency weights")
        print("  --no-tmtf          Use NH modulation gains for the test signal")
        print("  --fit=A,B          Sigmoid parameters; also prints I")
        print("  --ear left|right   Score this ear instead of the better ear")
        print("  --channel CH       Channel of stereo inputs (left, right or index)")
        print("  --f0 FILE          External F0 track (CSV 'time,f0')")
        print("  --diagnostics FILE Write the similarity matrix and diagnostics as JSON")
        print("  -o, --output FILE  Append a result row to a CSV file")
        print("\nExample usage:")
        print("  gesi.py compute --ref clean.wav --test noisy.wav --profile listener.json")
        print("  gesi.py compute --ref clean.wav --test noisy.wav --profile nh.json --fit=-20,10")
        return

    config = utils.load_config()
    params = GesiParams.from_config(
        config.get("gesi", {}),
        rho=args.rho, eta=args.eta, h_max=args.hmax,
        unit_weight_mode=True if args.unit_weights else None,
        use_tmtf=False if args.no_tmtf else None,
    )
    spl = args.calib_spl if args.calib_spl is not None else config["gesi"].get("calib_spl", 120.0)
    calib = CalibrationRef(spl_at_unit_rms=spl)
    fit = parse_fit(args.fit)

    profile = load_profile(args.profile)
    ref, fs = read_audio(args.ref, args.channel)
    test, fs_test = read_audio(args.test, args.channel)
    if fs != fs_test:
        raise ValidationError(f"reference is {fs} Hz but test is {fs_test} Hz")

    f0 = None
    if args.f0:
        f0 = load_f0_track(args.f0, n_epgram_frames(ref.size, fs), params.f0_epsilon)

    fb_config = FilterbankConfig.from_config(config.get("filterbank"), fs)
    result = compute_gesi(ref, test, fs, profile, params, calib,
                          fb_config=fb_config, f0=f0, ear=args.ear, fit=fit)

    print(f"d: {result.d:.6f}")
    if result.intelligibility is not None:
        print(f"I: {result.intelligibility:.3f}")

    if args.diagnostics:
        write_diagnostics(result, args.diagnostics)
        utils.info(f"Diagnostics written to {args.diagnostics}")
    if args.output:
        output = Path(args.output)
        new_file = not output.exists()
        with open(output, 'a', newline='') as f:
            writer = csv.DictWriter(f, fieldnames=RESULT_FIELDS)
            if new_file:
                writer.writeheader()
            writer.writerow(result_to_row(result, profile.listener_id, args.condition or ""))
        utils.info(f"Result appended to {output}")


def pairs_from_table(path) -> list:
    """(mean d, mean I_subj) per (listener_id, condition, snr) group of a prediction table.

    Tables without grouping columns contribute one pair per row.
    """
    path = Path(path)
    try:
        with open(path, 'r', newline='') as f:
            reader = csv.DictReader(f)
            fields = set(reader.fieldnames or [])
            if not {"d", "I_subj"} <= fields:
                raise ValidationError(f"{path}: table needs 'd' and 'I_subj' columns")
            rows = [r for r in reader if r.get("I_subj") not in (None, "")]
    except FileNotFoundError:
        raise AudioIOError(f"table not found: {path}")

    keys = [k for k in ("listener_id", "condition", "snr") if k in fields]
    groups = defaultdict(list)
    try:
        for n, row in enumerate(rows):
            key = tuple(row[k] for k in keys) if keys else n
            groups[key].append((float(row["d"]), float(row["I_subj"])))
    except ValueError as e:
        raise ValidationError(f"{path}: non-numeric value ({e})")

    pairs = []
    for key in sorted(groups, key=str):
        values = groups[key]
        pairs.append((sum(v[0] for v in values) / len(values), sum(v[1] for v in values) / len(values)))
    return pairs


def fit_sigmoid_command(args):
    """Handle the fit-sigmoid command."""
    if not args.table:
        print_fit_sigmoid_logo()
        print("\nAvailable options for 'fit-sigmoid' command:")
        print("-" * 50)
        print("Usage: gesi.py fit-sigmoid --table preds.csv [--imax 85]")
        print("\nOptions:")
        print("  --table FILE   CSV with 'd' and 'I_subj' columns (grouped by listener/condition/snr)")
        print("  --imax P       Upper asymptote in percent (default 85)")
        print("\nExample usage:")
        print("  gesi.py fit-sigmoid --table report.csv --imax 85")
        return

    config = utils.load_config()
    i_max = args.imax if args.imax is not None else config["gesi"].get("i_max", 85.0)
    fit = fit_sigmoid(pairs_from_table(args.table), i_max)
    print(f"a: {fit.a:.6f}")
    print(f"b: {fit.b:.6f}")
    print(f"residual: {fit.residual_rms:.6f}")


def register_command(subparsers):
    """Register the 'compute' and 'fit-sigmoid' commands with the subparsers."""
    compute_parser = subparsers.add_parser("compute", help="Compute GESI for a reference/test pair")
    compute_parser.add_argument("--ref", type=utils.file_path, help="Reference (clean) WAV file")
    compute_parser.add_argument("--test", type=utils.file_path, help="Test (processed/degraded) WAV file")
    compute_parser.add_argument("--profile", type=utils.file_path, help="Hearing-profile JSON file")
    compute_parser.add_argument("--rho", type=float, help="Level asymmetry exponent")
    compute_parser.add_argument("--eta", type=float, help="Channel efficiency exponent")
    compute_parser.add_argument("--hmax", type=float, help="SSI weight boundary h_max")
    compute_parser.add_argument("--calib-spl", type=float, help="dB SPL of a digital RMS of 1")
    compute_parser.add_argument("--unit-weights", action="store_true", help="Disable SSI and efficiency weights")
    compute_parser.add_argument("--no-tmtf", action="store_true", help="Use NH modulation gains for the test")
    compute_parser.add_argument("--fit", type=utils.float_list, help="Sigmoid parameters 'a,b'")
    compute_parser.add_argument("--ear", choices=["left", "right"], help="Ear to score (default: better ear)")
    compute_parser.add_argument("--channel", help="Channel of stereo inputs (left, right or index)")
    compute_parser.add_argument("--f0", type=utils.file_path, help="External F0 track CSV ('time,f0')")
    compute_parser.add_argument("--condition", help="Condition label for the CSV row")
    compute_parser.add_argument("--diagnostics", help="Write diagnostics JSON to this file")
    compute_parser.add_argument("-o", "--output", help="Append the result row to this CSV file")
    compute_parser.set_defaults(func=compute)

    fit_parser = subparsers.add_parser("fit-sigmoid", help="Fit the d-to-percent sigmoid")
    fit_parser.add_argument("--table", type=utils.file_path, help="Prediction table CSV")
    fit_parser.add_argument("--imax", type=float, help="Upper asymptote in percent")
    fit_parser.set_defaults(func=fit_sigmoid_command)
