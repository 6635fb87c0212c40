"""Speech envelope extraction and ratio-mean severity grading.

Pipeline: load and trim a word clip (``signal_io``), build its block-wise
max/min envelope (``envelope``), compare it with the normal speaker's
envelope and grade the deviation (``analysis``), then render tables
(``report``). ``synth`` makes deterministic fixtures; ``cli`` wires it all.
"""
__version__ = "0.1.0"

from .analysis import (
    PAPER_THRESHOLD,
    AnalysisConfig,
    DeviationBands,
    RatioStats,
    SeverityClass,
    SubjectSummary,
    WordResult,
    aggregate_subject,
    analyze_corpus,
    classify_deviation,
    determine_threshold,
    ratio_mean,
)
from .envelope import BlockExtrema, Envelope, block_extrema, build_envelope, truncate_to_block_multiple
from .kernels import BACKEND as KERNEL_BACKEND
from .signal_io import (
    AudioClip,
    equalize_length,
    load_manifest,
    load_wav,
    select_reference,
    signal_energy,
    trim_endpoints,
)
