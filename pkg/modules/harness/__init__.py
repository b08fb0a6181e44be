from .harness import register_command, sentence_scores
from .manifest import ManifestEntry, EvaluationManifest, entry_from_dict, load_manifest, check_paths
from .scoring import (
    WORD_PAD, YoudenResult,
    rmse_individual, rmse_mean_words, youden_threshold, sentence_si,
    segment_bounds, segment_words, better_ear_score,
)
from .batch import (
    FIT_ON_SUBSET, ItemScore, BatchResult,
    score_entry_words, score_task, score_manifest,
    select_closed_listeners, group_means, fit_on_subset, predict, run_batch, rmse_by_split,
)
from .report import TABLE_FIELDS, SUMMARY_FIELDS, write_table, read_table, write_summary

__all__ = [
    'register_command', 'sentence_scores',
    'ManifestEntry', 'EvaluationManifest', 'entry_from_dict', 'load_manifest', 'check_paths',
    'WORD_PAD', 'YoudenResult',
    'rmse_individual', 'rmse_mean_words', 'youden_threshold', 'sentence_si',
    'segment_bounds', 'segment_words', 'better_ear_score',
    'FIT_ON_SUBSET', 'ItemScore', 'BatchResult',
    'score_entry_words', 'score_task', 'score_manifest',
    'select_closed_listeners', 'group_means', 'fit_on_subset', 'predict', 'run_batch', 'rmse_by_split',
    'TABLE_FIELDS', 'SUMMARY_FIELDS', 'write_table', 'read_table', 'write_summary',
]
