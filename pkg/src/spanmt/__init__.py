"""Project entity and relation annotations through machine translation.

Entities are encoded as inline id-coded markup, carried through a translation
backend with tag handling, recovered by id, repaired, and re-validated; the
surviving annotation set is quantified and optionally routed through a human
review service.
"""

from .backends import (AuthenticationError, BackendError, IdentityBackend,
                       MockBackend, MockBehavior, ProviderError, RateLimitError,
                       RemoteBackend, RemoteConfig, TransportError,
                       TranslationRequest, TranslationResult)
from .corpus import (AnnotatedSentence, Corpus, CorpusError, DomainCount,
                     EntitySpan, FieldMapping, ParseError, Relation,
                     ValidationError, corpus_digest, deserialize,
                     import_token_indexed, load_corpus, save_corpus, serialize,
                     validate_corpus, validate_sentence)
from .markup import (AnomalyRecord, DecodedSentence, DecodeError,
                     MarkupDocument, decode_sentence, encode_sentence,
                     strip_tags)
from .metrics import (ConstantInputError, LanguageVectorSet, MetricError,
                      ReviewAggregate, TransferReport, corpus_stats,
                      cosine_distance, macro_f1, pearson, review_aggregate,
                      transfer_stats, transfer_stats_from_corpora)
from .pipeline import (MarkerConfig, RcInstance, SentenceOutcome,
                       TranslationRunManifest, back_translate,
                       export_rc_instances, mark_relation, translate_corpus)
from .postprocess import (PostprocessError, PunctuationPolicy,
                          apply_postprocess, strip_trailing_punctuation)
from .review import (EntityVerdict, Judgment, JudgmentLog, ReviewError,
                     ReviewTask, build_sample, create_app, load_sample,
                     save_sample)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
