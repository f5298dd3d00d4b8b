"""Mine parallel sentence pairs from comparable corpora by iterative self-training."""

from .corpus import (
    BilingualDictionary,
    ComparableCorpus,
    FormatError,
    ParallelCorpus,
    Sentence,
    SentencePair,
    load_comparable,
    load_dictionary,
    load_parallel,
    write_parallel,
)
from .decoder import GlossTranslation, gloss
from .lexicon import Lexicon, estimate, translate_token
from .metrics import TestSet, bleu, load_test_set, nist
from .retrieval import InvertedIndex, build_index, make_query, retrieve
from .scorer import MatchBreakdown, ScoreWeights, ngram_matches, similarity, stem
from .selector import CandidatePair, ThresholdTable, select, top_n
from .transduce import IterationReport, LoopConfig, Transducer, checkpoint, load_config, resume, run_loop

__version__ = "0.1.0"
