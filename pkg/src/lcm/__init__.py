"""Corpus mining toolkit.

A self-contained analysis stack for content analysis on document
collections: a stand-off annotation store, indexed boolean/BM25
retrieval, lexicometric statistics (frequency series, co-occurrence
significance, key terms), contextualized-dictionary retrieval, LDA topic
models (collapsed Gibbs and online variational inference), and a Naive
Bayes classifier with an analyst-driven review loop -- all runnable as
library calls, through the ``lcm`` CLI, or behind the HTTP job service.
"""

from .store import (Annotation, CorpusStore, Document, SubCollection,
                    StoreError, NotFoundError, IngestError,
                    AnnotationError, CollectionError)
from .textproc import (SentenceCorpus, Vocabulary, build_vocabulary,
                       split_sentences, tokenize, segment_document,
                       segment_collection)
from .index import IndexShard, build_index, SearchResult
from .query import parse_query, QueryParseError
from .lexicometrics import (ContingencyCounts, significance,
                            cooccurrence_counts, cooccurrence_graph,
                            extract_keyterms, frequency_series)
from .dictionary import (Dictionary, build_dictionary, score_document,
                         retrieve)
from .topics import (TopicModelState, fit_gibbs, fit_online, top_words,
                     topics_over_time, filter_by_topic)
from .classify import (CategoryTree, SpanStore, NBModel, train, predict,
                       build_queue, record_verdict, evaluate)
from .workspace import Config, Workspace
from .jobs import JobServer, Job, JobError, JobCancelled

__version__ = "0.1.0"

__all__ = [
    "Annotation", "CorpusStore", "Document", "SubCollection", "StoreError",
    "NotFoundError", "IngestError", "AnnotationError", "CollectionError",
    "SentenceCorpus", "Vocabulary", "build_vocabulary", "split_sentences",
    "tokenize", "segment_document", "segment_collection",
    "IndexShard", "build_index", "SearchResult", "parse_query",
    "QueryParseError",
    "ContingencyCounts", "significance", "cooccurrence_counts",
    "cooccurrence_graph", "extract_keyterms", "frequency_series",
    "Dictionary", "build_dictionary", "score_document", "retrieve",
    "TopicModelState", "fit_gibbs", "fit_online", "top_words",
    "topics_over_time", "filter_by_topic",
    "CategoryTree", "SpanStore", "NBModel", "train", "predict",
    "build_queue", "record_verdict", "evaluate",
    "Config", "Workspace", "JobServer", "Job", "JobError", "JobCancelled",
    "__version__",
]
