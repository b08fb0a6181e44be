import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from utils import ValidationError, AudioIOError


@dataclass(frozen=True)
class ManifestEntry:
    listener_id: str
    profile: Path
    reference: Path
    test: Path
    condition: str
    snr: Optional[float] = None
    subjective_si: Optional[float] = None
    word_spans: Optional[tuple] = None
    binaural: bool = False
    f0: Optional[Path] = None
    channel: Optional[str] = None

    @property
    def group(self) -> tuple:
        return (self.listener_id, self.condition, self.snr)


@dataclass
class EvaluationManifest:
    entries: list = field(default_factory=list)
    path: Optional[Path] = None

    def __len__(self):
        return len(self.entries)

    @property
    def listeners(self) -> list:
        return sorted({e.listener_id for e in self.entries})


def _spans(raw, where: str):
    if raw is None:
        return None
    try:
        spans = tuple((float(s), float(e)) for s, e in raw)
    except (TypeError, ValueError):
        raise ValidationError(f"{where}: word_spans must be a list of [start, end] pairs")
    for start, end in spans:
        if end < start:
            raise ValidationError(f"{where}: inverted word span ({start}, {end})")
    return spans


def _optional_float(value, name: str, where: str):
    if value is None:
        return None
    try:
        value = float(value)
    except (TypeError, ValueError):
        raise ValidationError(f"{where}: {name} must be a number, got {value!r}")
    if not math.isfinite(value):
        raise ValidationError(f"{where}: {name} must be finite")
    return value


def entry_from_dict(data: dict, base: Path, index: int) -> ManifestEntry:
    where = f"manifest entry {index}"
    if not isinstance(data, dict):
        raise ValidationError(f"{where} must be an object")
    for key in ("listener_id", "profile", "reference", "test", "condition"):
        if not data.get(key):
            raise ValidationError(f"{where}: '{key}' is missing or empty")

    subjective = _optional_float(data.get("subjective_si"), "subjective_si", where)
    if subjective is not None and not 0.0 <= subjective <= 100.0:
        raise ValidationError(f"{where}: subjective_si must be within [0, 100], got {subjective}")
    return ManifestEntry(
        listener_id=str(data["listener_id"]),
        profile=base / data["profile"],
        reference=base / data["reference"],
        test=base / data["test"],
        condition=str(data["condition"]),
        snr=_optional_float(data.get("snr"), "snr", where),
        subjective_si=subjective,
        word_spans=_spans(data.get("word_spans"), where),
        binaural=bool(data.get("binaural", False)),
        f0=base / data["f0"] if data.get("f0") else None,
        channel=data.get("channel"),
    )


def load_manifest(path) -> EvaluationManifest:
    """Read a manifest JSON: a list of entries or {"entries": [...]}; paths relative to the file."""
    path = Path(path)
    try:
        with open(path, 'r') as f:
            data = json.load(f)
    except FileNotFoundError:
        raise AudioIOError(f"manifest not found: {path}")
    except json.JSONDecodeError as e:
        raise ValidationError(f"manifest {path} is not valid JSON: {e}")

    if isinstance(data, dict):
        data = data.get("entries", [])
    if not isinstance(data, list):
        raise ValidationError(f"manifest {path} must hold a list of entries")
    base = path.parent
    return EvaluationManifest(entries=[entry_from_dict(e, base, i) for i, e in enumerate(data)], path=path)


def check_paths(manifest: EvaluationManifest):
    """Raise AudioIOError for the first entry path that does not exist."""
    for i, entry in enumerate(manifest.entries):
        for p in (entry.profile, entry.reference, entry.test, entry.f0):
            if p is not None and not p.is_file():
                raise AudioIOError(f"manifest entry {i}: file not found: {p}")
