"""simplemt: post-edit machine translation to a target vocabulary age.

Words are rated by Age of Acquisition (AoA); the controller iteratively asks a
pluggable rewriter to replace the hardest word until the sentence fits the
target age. The package also ships the back-translation dataset factory, an
AoA-constrained beam-search baseline, the metric suite, an HTTP service and a
CLI.
"""

from .controller import IterationRecord, SimplifyResult, StopReason, select_targets, simplify, simplify_user
from .dataset import DatasetExample, build_examples, filter_pairs, select_target_age, split
from .lexicon import AoaLexicon, LexiconFormat, load_lexicon, lookup, normalize
from .metrics import MetricReport, average_max_aoa, bleu, dale_chall, fkgl, sari, success_rate
from .rewriter import PromptVariant, RewriterBackend, SimplifyRequest, build_prompt, mock_backend, rewrite
from .textproc import (
    AnalyzedSentence,
    EditTaggedSentence,
    Token,
    annotate,
    count_syllables,
    strip_tags,
    tag_words,
    tokenize,
    words_above,
)

__version__ = "0.1.0"
