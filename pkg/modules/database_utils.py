"""SQLite cache of per-entry word scores, keyed by input contents and settings."""
import sqlite3
import json
import datetime
import hashlib
from pathlib import Path
from typing import Optional, Dict, Any
from contextlib import contextmanager

# Seconds a writer waits for a lock held by another worker
LOCK_WAIT = 60.0

# Bumped when the stored layout changes; rows of older versions are ignored
CACHE_VERSION = 2

RESULT_CACHE_SCHEMA = f"""
CREATE TABLE IF NOT EXISTS score_cache (
    cache_key TEXT NOT NULL,
    version INTEGER NOT NULL DEFAULT {CACHE_VERSION},
    n_scores INTEGER NOT NULL,
    scores TEXT NOT NULL,
    created TEXT NOT NULL,
    PRIMARY KEY (cache_key, version)
);
"""

_SESSION_PRAGMAS = {
    "synchronous": "NORMAL",
    "temp_store": "MEMORY",
    "busy_timeout": int(LOCK_WAIT * 1000),
}


@contextmanager
def get_db_connection(db_path: Path):
    """Open the score cache; the block runs as one transaction.

    Commits when the block completes and rolls back when it raises.
    """
    conn = sqlite3.connect(db_path, timeout=LOCK_WAIT)
    try:
        for name, value in _SESSION_PRAGMAS.items():
            conn.execute(f"PRAGMA {name}={value}")
        with conn:
            yield conn
    finally:
        conn.close()


def init_db_with_wal(db_path: Path, schema: str = RESULT_CACHE_SCHEMA):
    """Create the cache file in WAL mode and apply the schema."""
    db_path.parent.mkdir(parents=True, exist_ok=True)
    conn = sqlite3.connect(db_path, timeout=LOCK_WAIT)
    try:
        conn.execute("PRAGMA journal_mode=WAL")
        conn.executescript(schema)
    finally:
        conn.close()


def get_file_hash(file_path: Path) -> str:
    """SHA-256 of a file's contents."""
    hash_obj = hashlib.sha256()
    with open(file_path, 'rb') as f:
        for chunk in iter(lambda: f.read(1 << 16), b''):
            hash_obj.update(chunk)
    return hash_obj.hexdigest()


def cache_key(files: list, settings: Dict[str, Any]) -> str:
    """Key from the contents of the input files and the analysis settings."""
    hash_obj = hashlib.sha256()
    for file_path in files:
        hash_obj.update((get_file_hash(file_path) if file_path else "-").encode())
    hash_obj.update(json.dumps(settings, sort_keys=True, default=str).encode())
    return hash_obj.hexdigest()


def lookup_scores(db_path: Path, key: str) -> Optional[list]:
    """Cached scores for a key, or None when absent or stored incompletely."""
    if not db_path.exists():
        return None
    with get_db_connection(db_path) as conn:
        row = conn.execute(
            "SELECT n_scores, scores FROM score_cache WHERE cache_key = ? AND version = ?",
            (key, CACHE_VERSION)).fetchone()
    if row is None:
        return None
    n_scores, payload = row
    scores = json.loads(payload)
    return scores if len(scores) == n_scores else None


def store_scores(db_path: Path, key: str, scores: list):
    """Insert or replace the scores for a key."""
    scores = [float(s) for s in scores]
    with get_db_connection(db_path) as conn:
        conn.execute(
            "INSERT OR REPLACE INTO score_cache (cache_key, version, n_scores, scores, created) "
            "VALUES (?, ?, ?, ?, ?)",
            (key, CACHE_VERSION, len(scores), json.dumps(scores), datetime.datetime.now().isoformat()))
