import csv
from pathlib import Path

from utils import ValidationError, AudioIOError

TABLE_FIELDS = ['repeat', 'listener_id', 'condition', 'snr', 'item', 'word', 'split', 'd', 'I_pred', 'I_subj']
SUMMARY_FIELDS = ['repeat', 'split', 'condition', 'n_groups', 'rmse_individual', 'rmse_mean_words']

_INT_FIELDS = {'repeat', 'item', 'word', 'n_groups'}
_FLOAT_FIELDS = {'snr', 'd', 'I_pred', 'I_subj', 'rmse_individual', 'rmse_mean_words'}


def _format(value):
    if value is None:
        return ""
    if isinstance(value, float):
        return f"{value:.10g}"
    return value


def _write(rows, path, fieldnames):
    with open(path, 'w', newline='') as f:
        writer = csv.DictWriter(f, fieldnames=fieldnames, lineterminator='\n')
        writer.writeheader()
        for row in rows:
            writer.writerow({k: _format(row.get(k)) for k in fieldnames})


def write_table(rows, path):
    _write(rows, path, TABLE_FIELDS)


def write_summary(rows, path):
    _write(rows, path, SUMMARY_FIELDS)


def read_table(path) -> list:
    """Read a prediction table back with typed columns; empty cells become None."""
    path = Path(path)
    try:
        with open(path, 'r', newline='') as f:
            reader = csv.DictReader(f)
            missing = set(TABLE_FIELDS) - set(reader.fieldnames or [])
            if missing:
                raise ValidationError(f"{path}: table lacks columns {sorted(missing)}")
            raw = list(reader)
    except FileNotFoundError:
        raise AudioIOError(f"table not found: {path}")

    rows = []
    for line, r in enumerate(raw, start=2):
        row = {}
        try:
            for key in TABLE_FIELDS:
                value = r[key]
                if value == "":
                    row[key] = None
                elif key in _INT_FIELDS:
                    row[key] = int(value)
                elif key in _FLOAT_FIELDS:
                    row[key] = float(value)
                else:
                    row[key] = value
        except ValueError as e:
            raise ValidationError(f"{path}:{line}: {e}")
        rows.append(row)
    return rows
