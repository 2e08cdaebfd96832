"""
Feature selection and vectorization for binary bag-of-words features.

Documents are counted with set semantics into term/class document
frequencies. Every term is scored per class by its information gain, the mutual
information between the term's presence and membership in the class, with
probabilities taken as plain fractions of training documents. The top n terms
of every class ranking are merged into one feature space (round robin), so that
every class is represented by the terms that best separate it from the rest.
"""

import math
from collections import Counter, defaultdict
from typing import (Any, Dict, Iterable, List, Mapping, Optional, Sequence,
                    Tuple)

import numpy as np
import scipy.sparse as sp

from pysilver.exception import ParseError

SparseBinaryVector = Tuple[int, ...]

DEFAULT_N_PER_CLASS = 10000

# Scores are compared at this many decimals when ranking.
SCORE_DECIMALS = 12


class TermClassCounts:
    """
    Document frequency statistics of a labeled corpus. N is the number of
    documents, n_c the documents of every class, df_t the documents containing
    every term, and df_tc the documents of every class containing every term.
    """
    def __init__(self) -> None:
        self.N: int = 0
        self.n_c: Counter = Counter()
        self.df_t: Counter = Counter()
        self.df_tc: Dict[str, Counter] = defaultdict(Counter)

    def add(self, tokens: Iterable[str], label: str) -> None:
        """
        Count one document. Repeated terms in the document count once.

        Args:
            tokens: The document's tokens.
            label: The document's class.
        """
        self.N += 1
        self.n_c[label] += 1
        for term in set(tokens):
            self.df_t[term] += 1
            self.df_tc[term][label] += 1

    def merge(self, other: 'TermClassCounts') -> 'TermClassCounts':
        """
        Combine the counts of two shards. Merging is associative and
        commutative, and equals counting the concatenated shards.

        Args:
            other: The counts of another shard.

        Returns:
            New counts holding the sums.
        """
        merged = TermClassCounts()
        merged.N = self.N + other.N
        merged.n_c = self.n_c + other.n_c
        merged.df_t = self.df_t + other.df_t
        for source in (self.df_tc, other.df_tc):
            for term, per_class in source.items():
                merged.df_tc[term].update(per_class)

        return merged

    @property
    def vocabulary(self) -> List[str]:
        """
        Every counted term, in lexicographic order.
        """
        return sorted(self.df_t)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TermClassCounts):
            return NotImplemented
        mine = {t: +c for t, c in self.df_tc.items() if +c}
        theirs = {t: +c for t, c in other.df_tc.items() if +c}
        return (self.N == other.N and +self.n_c == +other.n_c
                and +self.df_t == +other.df_t and mine == theirs)


def count(corpus: Iterable[Tuple[Sequence[str], str]]) -> TermClassCounts:
    """
    Count a corpus of tokenized, labeled documents.

    Args:
        corpus: Pairs of (tokens, class).

    Returns:
        The document frequency statistics.
    """
    counts = TermClassCounts()
    for tokens, label in corpus:
        counts.add(tokens, label)

    return counts


def _xlogx_ratio(joint, row, col, n):
    """
    The summand P(t,c) log2(P(t,c) / (P(t) P(c))) from integer cell counts,
    with zero joint cells contributing zero. Works elementwise on arrays.
    """
    joint = np.asarray(joint, dtype=np.float64)
    row = np.asarray(row, dtype=np.float64)
    col = np.asarray(col, dtype=np.float64)
    with np.errstate(divide='ignore', invalid='ignore'):
        term = (joint / n) * np.log2((joint * n) / (row * col))

    return np.where(joint > 0, term, 0.0)


def _ig_cells(df_tc, df_t, n_c, n):
    """
    Information gain from the four cells of the term/class contingency table.
    Arguments may be arrays; the result is clamped at zero.
    """
    df_tc = np.asarray(df_tc, dtype=np.float64)
    df_t = np.asarray(df_t, dtype=np.float64)
    n_c = np.asarray(n_c, dtype=np.float64)

    not_t = n - df_t
    not_c = n - n_c
    total = (_xlogx_ratio(df_tc, df_t, n_c, n)
             + _xlogx_ratio(df_t - df_tc, df_t, not_c, n)
             + _xlogx_ratio(n_c - df_tc, not_t, n_c, n)
             + _xlogx_ratio(n - df_t - n_c + df_tc, not_t, not_c, n))

    return np.maximum(total, 0.0)


def information_gain(counts: TermClassCounts, term: str, label: str) -> float:
    """
    The information gain of a term for a class, in bits.

    Args:
        counts: The corpus statistics.
        term: The term. Unseen terms score 0.
        label: The class.

    Returns:
        H(c) - H(c|t) computed from maximum likelihood probabilities.

    Raises:
        ValueError: If the corpus is empty.
    """
    if counts.N == 0:
        raise ValueError('Information gain is undefined on an empty corpus')

    df_tc = counts.df_tc[term][label] if term in counts.df_tc else 0
    return float(_ig_cells(df_tc, counts.df_t[term], counts.n_c[label],
                           counts.N))


def information_gain_table(counts: TermClassCounts, terms: Sequence[str],
                           label: str) -> np.ndarray:
    """
    The information gain of many terms for one class at once.

    Args:
        counts: The corpus statistics.
        terms: The terms to score.
        label: The class.

    Returns:
        An array of scores aligned with terms.

    Raises:
        ValueError: If the corpus is empty.
    """
    if counts.N == 0:
        raise ValueError('Information gain is undefined on an empty corpus')

    df_t = np.fromiter((counts.df_t[t] for t in terms), dtype=np.float64,
                       count=len(terms))
    df_tc = np.fromiter((counts.df_tc[t][label] if t in counts.df_tc else 0
                         for t in terms),
                        dtype=np.float64,
                        count=len(terms))

    return _ig_cells(df_tc, df_t, counts.n_c[label], counts.N)


def entropy(probabilities: Iterable[float]) -> float:
    """
    The entropy in bits of a distribution, with 0 log 0 taken as 0.

    Args:
        probabilities: The probabilities of the outcomes.

    Returns:
        The entropy.
    """
    return -sum(p * math.log2(p) for p in probabilities if p > 0)


class FeatureSpace:
    """
    The selected vocabulary. Terms are kept in lexicographic order and a term's
    column id is its position, so the space does not depend on score ordering
    and serializes identically on every platform. per_class_top holds, for
    every class, its own top terms in rank order.
    """

    __slots__ = ['_terms', '_index', '_per_class_top', '_n_per_class']

    def __init__(self, per_class_top: Mapping[str, Sequence[str]],
                 n_per_class: int) -> None:
        """
        Create a FeatureSpace from per class selections.

        Args:
            per_class_top: Class to its selected terms.
            n_per_class: The selection size each class was allowed.
        """
        self._per_class_top: Dict[str, List[str]] = {
            label: list(terms)
            for label, terms in per_class_top.items()
        }
        self._n_per_class: int = n_per_class
        self._terms: List[str] = sorted(
            {t
             for terms in self._per_class_top.values()
             for t in terms})
        self._index: Dict[str, int] = {t: i for i, t in enumerate(self._terms)}

    @property
    def terms(self) -> List[str]:
        """
        A copy of the selected terms, in column order.
        """
        return list(self._terms)

    @property
    def index(self) -> Dict[str, int]:
        """
        The term to column id map. This is the live map and must not be changed.
        """
        return self._index

    @property
    def per_class_top(self) -> Dict[str, List[str]]:
        """
        A copy of every class's selected terms, in rank order.
        """
        return {label: list(terms) for label, terms in self._per_class_top.items()}

    @property
    def n_per_class(self) -> int:
        return self._n_per_class

    def __len__(self) -> int:
        return len(self._terms)

    def __contains__(self, term: object) -> bool:
        return term in self._index

    @classmethod
    def from_json(cls, obj: Mapping[str, Any]) -> 'FeatureSpace':
        """
        Create a FeatureSpace from its JSON object.

        Args:
            obj: The object with keys n_per_class, terms, and per_class_top.

        Returns:
            The equivalent FeatureSpace.

        Raises:
            ParseError: If the object is malformed or its terms disagree with
                its per class selections.
        """
        try:
            space = cls(obj['per_class_top'], int(obj['n_per_class']))
        except (KeyError, TypeError, ValueError) as err:
            raise ParseError('Malformed feature space') from err

        if 'terms' in obj and list(obj['terms']) != space._terms:
            raise ParseError(
                'Feature space terms are not the union of the class selections')

        return space

    def to_json(self) -> Dict[str, Any]:
        return {
            'n_per_class': self._n_per_class,
            'terms': list(self._terms),
            'per_class_top': self.per_class_top
        }

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FeatureSpace):
            return NotImplemented
        return self.to_json() == other.to_json()


def rank_terms(counts: TermClassCounts, label: str) -> List[str]:
    """
    Rank the whole vocabulary for one class: by information gain descending
    (compared to SCORE_DECIMALS places), then by document frequency
    descending, then lexicographically.

    Args:
        counts: The corpus statistics.
        label: The class.

    Returns:
        The ranked terms.
    """
    vocabulary = counts.vocabulary
    if not vocabulary:
        return []

    # Equal scores computed from different cells can differ in the last bits.
    scores = np.round(information_gain_table(counts, vocabulary, label),
                      SCORE_DECIMALS)
    df = np.fromiter((counts.df_t[t] for t in vocabulary), dtype=np.int64,
                     count=len(vocabulary))
    lex = np.arange(len(vocabulary))

    # np.lexsort sorts by the last key first.
    order = np.lexsort((lex, -df, -scores))
    return [vocabulary[i] for i in order.tolist()]


def select_round_robin(counts: TermClassCounts,
                       classes: Sequence[str],
                       n_per_class: int = DEFAULT_N_PER_CLASS) -> FeatureSpace:
    """
    Select the top n terms of every class ranking and merge them.

    Args:
        counts: The corpus statistics.
        classes: The classes to select for.
        n_per_class: How many terms every class contributes at most.

    Returns:
        The merged FeatureSpace.

    Raises:
        ValueError: If n_per_class is less than 1.
    """
    if n_per_class < 1:
        raise ValueError(f'n_per_class must be at least 1, got {n_per_class}')

    per_class_top = {
        label: rank_terms(counts, label)[:n_per_class]
        for label in classes
    }

    return FeatureSpace(per_class_top, n_per_class)


def vectorize(tokens: Iterable[str], space: FeatureSpace) -> SparseBinaryVector:
    """
    Map tokens onto the feature space. Tokens outside the space are ignored.

    Args:
        tokens: The tokens.
        space: The feature space.

    Returns:
        The sorted distinct column ids of the tokens present.
    """
    index = space.index
    return tuple(sorted({index[t] for t in tokens if t in index}))


def to_matrix(vectors: Sequence[SparseBinaryVector],
              n_features: int,
              n_rows: Optional[int] = None) -> sp.csr_matrix:
    """
    Stack binary vectors into a sparse design matrix.

    Args:
        vectors: The vectors, one per row.
        n_features: The number of columns.
        n_rows: The number of rows, defaults to the number of vectors.

    Returns:
        A float64 CSR matrix with ones at the present columns.
    """
    indptr = np.zeros(len(vectors) + 1, dtype=np.int64)
    indptr[1:] = np.cumsum([len(v) for v in vectors])
    indices = np.fromiter((j for v in vectors for j in v), dtype=np.int64,
                          count=int(indptr[-1]))
    data = np.ones(len(indices), dtype=np.float64)
    shape = (len(vectors) if n_rows is None else n_rows, n_features)

    return sp.csr_matrix((data, indices, indptr), shape=shape)


def vectorize_corpus(documents: Iterable[Iterable[str]],
                     space: FeatureSpace) -> sp.csr_matrix:
    """
    Vectorize many token lists into a design matrix over the feature space.

    Args:
        documents: The token lists, one per row.
        space: The feature space.

    Returns:
        The CSR matrix of the documents' binary vectors.
    """
    return to_matrix([vectorize(tokens, space) for tokens in documents], len(space))
