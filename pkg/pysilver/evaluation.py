"""
Confusion matrices, per class and macro averaged metrics, and the experiment
protocols built on them: held out evaluation, stratified cross validation,
learning curves, coarse class evaluation, and evaluation on data from a later
time window.

Matrix rows are true classes and columns are predicted classes. A metric whose
denominator is zero is defined as 0.
"""

import csv
import json
import logging
import os
from collections import OrderedDict
from typing import (Any, Dict, Iterable, Iterator, List, Mapping, NamedTuple,
                    Optional, Sequence, Tuple, Union)

import numpy as np

from pysilver import pipeline
from pysilver.corpus import balance_sample, class_rng, group_by_class
from pysilver.exception import CorpusError, EvaluationError, ParseError
from pysilver.features import DEFAULT_N_PER_CLASS
from pysilver.svm import MulticlassModel, TrainConfig
from pysilver.unit.example import LabeledExample
from pysilver.unit.scheme import ClassScheme

logger = logging.getLogger(__name__)

PathLike = Union[str, bytes, os.PathLike]


class ConfusionMatrix:
    """
    Counts of (true, predicted) class pairs over a fixed class list.
    """

    __slots__ = ['_class_list', '_counts']

    def __init__(self, class_list: Sequence[str], counts: Any) -> None:
        """
        Create a ConfusionMatrix.

        Args:
            class_list: The classes, naming rows and columns in order.
            counts: A square array like of non-negative integers, rows true
                classes and columns predicted classes.

        Raises:
            EvaluationError: If the counts are not square, do not match the
                classes, or are negative.
        """
        try:
            counts = np.array(counts, dtype=np.int64)
        except (TypeError, ValueError) as err:
            raise EvaluationError('Confusion counts must be a square integer array') from err
        if not class_list and counts.size == 0:
            counts = np.zeros((0, 0), dtype=np.int64)
        if counts.shape != (len(class_list), len(class_list)):
            raise EvaluationError(
                f'A matrix over {len(class_list)} classes must be square, got shape {counts.shape}'
            )
        if (counts < 0).any():
            raise EvaluationError('Confusion counts must be non-negative')
        if len(set(class_list)) != len(class_list):
            raise EvaluationError('Matrix classes must be distinct')

        self._class_list: List[str] = list(class_list)
        self._counts: np.ndarray = counts

    @property
    def class_list(self) -> List[str]:
        return list(self._class_list)

    @property
    def counts(self) -> np.ndarray:
        """
        A copy of the counts.
        """
        return self._counts.copy()

    @property
    def total(self) -> int:
        return int(self._counts.sum())

    @property
    def trace(self) -> int:
        return int(np.trace(self._counts))

    def count(self, true: str, predicted: str) -> int:
        """
        The number of examples of class true predicted as class predicted.
        """
        return int(self._counts[self._class_list.index(true),
                                self._class_list.index(predicted)])

    def reorder(self, class_list: Sequence[str]) -> 'ConfusionMatrix':
        """
        The same matrix with rows and columns permuted to a new class order.

        Raises:
            EvaluationError: If class_list is not a permutation of the classes.
        """
        if sorted(class_list) != sorted(self._class_list):
            raise EvaluationError('Can only reorder to a permutation of the classes')

        order = [self._class_list.index(c) for c in class_list]
        return ConfusionMatrix(class_list, self._counts[np.ix_(order, order)])

    def to_json(self) -> Dict[str, Any]:
        return {'class_list': self.class_list, 'counts': self._counts.tolist()}

    def write_tsv(self, writable: Any) -> None:
        """
        Write the matrix as TSV, with the classes as header row and column.

        Args:
            writable: The text sink to write to.
        """
        writer = csv.writer(writable, delimiter='\t', lineterminator='\n')
        writer.writerow([''] + self._class_list)
        for label, row in zip(self._class_list, self._counts.tolist()):
            writer.writerow([label] + row)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ConfusionMatrix):
            return NotImplemented
        return self._class_list == other._class_list and np.array_equal(
            self._counts, other._counts)

    def __repr__(self) -> str:
        return f'ConfusionMatrix({self._class_list!r}, {self._counts.tolist()!r})'


def read_matrix_tsv(file_descriptor: PathLike) -> ConfusionMatrix:
    """
    Read a confusion matrix written as TSV, such as one written by write_tsv.

    Args:
        file_descriptor: The file to read.

    Returns:
        The matrix.

    Raises:
        IOError: If the file cannot be opened.
        ParseError: If a row is malformed, naming its line.
    """
    with open(file_descriptor, encoding='utf-8', newline='') as f:
        rows = [row for row in csv.reader(f, delimiter='\t') if row]

    if not rows:
        raise ParseError('The matrix file is empty')

    class_list = rows[0][1:]
    counts = []
    for line_num, row in enumerate(rows[1:], 2):
        if len(row) != len(class_list) + 1:
            raise ParseError(
                f'Line {line_num} has {len(row) - 1} counts, expected {len(class_list)}')
        if len(counts) >= len(class_list) or row[0] != class_list[len(counts)]:
            raise ParseError(f'Line {line_num} has an unexpected row class {row[0]!r}')
        try:
            counts.append([int(cell) for cell in row[1:]])
        except ValueError as err:
            raise ParseError(f'Line {line_num} has a non-integer count') from err

    try:
        return ConfusionMatrix(class_list, counts)
    except EvaluationError as err:
        raise ParseError(f'The matrix file is not a valid matrix: {err}') from err


def confusion(pairs: Iterable[Tuple[str, str]],
              class_list: Sequence[str]) -> ConfusionMatrix:
    """
    Count (true, predicted) pairs into a matrix.

    Args:
        pairs: The (true class, predicted class) pairs.
        class_list: The classes of the matrix.

    Returns:
        The matrix.

    Raises:
        EvaluationError: If a pair names a class outside class_list.
    """
    position = {label: i for i, label in enumerate(class_list)}
    counts = np.zeros((len(class_list), len(class_list)), dtype=np.int64)
    for true, predicted in pairs:
        try:
            counts[position[true], position[predicted]] += 1
        except KeyError as err:
            raise EvaluationError(f'Class {err.args[0]!r} is not in the class list') from err

    return ConfusionMatrix(class_list, counts)


class ClassMetrics(NamedTuple):
    precision: float
    recall: float
    f1: float


def _safe_divide(num: np.ndarray, den: np.ndarray) -> np.ndarray:
    num = np.asarray(num, dtype=np.float64)
    den = np.asarray(den, dtype=np.float64)
    return np.divide(num, den, out=np.zeros_like(num), where=den != 0)


def per_class_metrics(matrix: ConfusionMatrix) -> 'OrderedDict[str, ClassMetrics]':
    """
    Precision, recall and F1 of every class.

    Args:
        matrix: The confusion matrix.

    Returns:
        Class to its metrics, in matrix order.
    """
    counts = matrix.counts
    diag = np.diagonal(counts)
    precision = _safe_divide(diag, counts.sum(axis=0))
    recall = _safe_divide(diag, counts.sum(axis=1))
    f1 = _safe_divide(2 * precision * recall, precision + recall)

    return OrderedDict(
        (label, ClassMetrics(float(p), float(r), float(f)))
        for label, p, r, f in zip(matrix.class_list, precision, recall, f1))


class EvalReport:
    """
    The metrics of one evaluation, the matrix they come from, and metadata
    describing the run (variant, seed, training size, time windows).
    """
    def __init__(self, per_class: Mapping[str, ClassMetrics],
                 macro: ClassMetrics, accuracy: float, matrix: ConfusionMatrix,
                 metadata: Optional[Mapping[str, Any]] = None) -> None:
        self.per_class = OrderedDict(per_class)
        self.macro = macro
        self.accuracy = accuracy
        self.matrix = matrix
        self.metadata: Dict[str, Any] = dict(metadata or {})

    def to_json(self) -> Dict[str, Any]:
        return {
            'accuracy': self.accuracy,
            'macro': self.macro._asdict(),
            'per_class': {c: m._asdict()
                          for c, m in self.per_class.items()},
            'matrix': self.matrix.to_json(),
            'metadata': dict(self.metadata)
        }

    def write(self, writable: Any) -> None:
        """
        Write the report as a JSON document.
        """
        json.dump(self.to_json(), writable, ensure_ascii=False, indent=2)
        writable.write('\n')


def macro_report(matrix: ConfusionMatrix,
                 metadata: Optional[Mapping[str, Any]] = None) -> EvalReport:
    """
    Macro averaged metrics, the unweighted means of the per class metrics, and
    accuracy.

    Args:
        matrix: The confusion matrix.
        metadata: Facts about the run to attach to the report.

    Returns:
        The report. Accuracy of an empty matrix is 0.
    """
    per_class = per_class_metrics(matrix)
    if per_class:
        values = np.array(list(per_class.values()))
        macro = ClassMetrics(*(float(v) for v in values.mean(axis=0)))
    else:
        macro = ClassMetrics(0.0, 0.0, 0.0)

    accuracy = matrix.trace / matrix.total if matrix.total else 0.0
    return EvalReport(per_class, macro, accuracy, matrix, metadata)


def micro_metrics(matrix: ConfusionMatrix) -> ClassMetrics:
    """
    Micro averaged metrics, computed from the counts of all classes pooled.
    With one prediction per example all three equal accuracy.

    Args:
        matrix: The confusion matrix.

    Returns:
        The pooled precision, recall, and F1.
    """
    counts = matrix.counts
    tp = float(matrix.trace)
    predicted = float(counts.sum(axis=0).sum())
    true = float(counts.sum(axis=1).sum())
    precision = tp / predicted if predicted else 0.0
    recall = tp / true if true else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return ClassMetrics(precision, recall, f1)


def coarsen_matrix(matrix: ConfusionMatrix, scheme: ClassScheme) -> ConfusionMatrix:
    """
    Fold a matrix over the scheme's classes into one over its coarse classes,
    by summing the counts of rows and of columns that share a coarse class.

    Raises:
        SchemeError: If a class of the matrix is not in the scheme.
    """
    coarse_list = scheme.coarse_list
    position = {c: i for i, c in enumerate(coarse_list)}
    fold = np.zeros((len(matrix.class_list), len(coarse_list)), dtype=np.int64)
    for i, label in enumerate(matrix.class_list):
        fold[i, position[scheme.coarse(label)]] = 1

    return ConfusionMatrix(coarse_list, fold.T @ matrix.counts @ fold)


def evaluate(model: MulticlassModel,
             test: Sequence[LabeledExample],
             metadata: Optional[Mapping[str, Any]] = None) -> EvalReport:
    """
    Evaluate a model on labeled examples.

    Args:
        model: The model.
        test: The test examples.
        metadata: Extra facts to attach to the report.

    Returns:
        The report, with the model's variant and training size in its metadata.

    Raises:
        EvaluationError: If the test set is empty or has classes the model does
            not know.
    """
    if not test:
        raise EvaluationError('Cannot evaluate on an empty test set')

    predicted = pipeline.predict_examples(model, test)
    matrix = confusion(zip((e.label for e in test), predicted), model.class_list)

    info = {
        'variant': model.pipeline.get('variant'),
        'seed': model.config.seed,
        'training_size': model.metadata.get('training_size'),
        'test_size': len(test)
    }
    info.update(metadata or {})
    return macro_report(matrix, info)


def silver_gold_eval(model: MulticlassModel,
                     test_sets: Mapping[str, Sequence[LabeledExample]]
                     ) -> 'OrderedDict[str, EvalReport]':
    """
    Evaluate one model on several named test sets, such as a silver holdout and
    a gold annotated set.

    Returns:
        Test set name to its report, in input order.
    """
    return OrderedDict((name, evaluate(model, test, {'test_set': name}))
                       for name, test in test_sets.items())


def drift_eval(model: MulticlassModel,
               later_test: Sequence[LabeledExample],
               metadata: Optional[Mapping[str, Any]] = None) -> EvalReport:
    """
    Evaluate a model on test data harvested after its training data. The report
    carries the time windows of both, as [first, last] timestamps or None when
    the data has none.

    Raises:
        EvaluationError: If the test set is empty.
    """
    info = {
        'train_window': model.metadata.get('train_window'),
        'test_window': pipeline.time_window(later_test)
    }
    info.update(metadata or {})
    return evaluate(model, later_test, info)


def random_baseline(test: Sequence[LabeledExample], classes: Sequence[str],
                    seed: int) -> EvalReport:
    """
    Evaluate uniformly random predictions, the floor any classifier should beat.

    Raises:
        EvaluationError: If the test set is empty.
    """
    if not test:
        raise EvaluationError('Cannot evaluate on an empty test set')

    rng = np.random.default_rng(seed & 0xFFFFFFFF)
    picks = rng.integers(len(classes), size=len(test)).tolist()
    predicted = [classes[k] for k in picks]
    matrix = confusion(zip((e.label for e in test), predicted), classes)

    return macro_report(matrix, {'variant': 'random', 'seed': seed,
                                 'test_size': len(test)})


def stratified_folds(examples: Sequence[LabeledExample], k: int,
                     seed: int) -> List[int]:
    """
    Assign every example to one of k folds, spreading every class evenly over
    the folds in a seeded random order.

    Args:
        examples: The examples.
        k: The number of folds.
        seed: The seed of the assignment.

    Returns:
        The fold of every example, in input order.

    Raises:
        ValueError: If k is less than 2.
        CorpusError: If a class has fewer than k examples.
    """
    if k < 2:
        raise ValueError(f'k must be at least 2, got {k}')

    assignment = [0] * len(examples)
    groups: Dict[str, List[int]] = OrderedDict()
    for i, example in enumerate(examples):
        groups.setdefault(example.label, []).append(i)

    for label, positions in groups.items():
        if len(positions) < k:
            raise CorpusError(
                f'Class {label} has {len(positions)} examples, needs at least {k} for {k} folds'
            )
        order = class_rng(seed, label).permutation(len(positions))
        for rank, j in enumerate(order.tolist()):
            assignment[positions[j]] = rank % k

    return assignment


def iter_folds(
        examples: Sequence[LabeledExample], k: int, seed: int
) -> Iterator[Tuple[List[LabeledExample], List[LabeledExample]]]:
    """
    Yield the (train, test) split of every fold. Both parts keep input order
    and every example is in exactly one test part.
    """
    assignment = stratified_folds(examples, k, seed)
    for fold in range(k):
        train = [e for e, a in zip(examples, assignment) if a != fold]
        test = [e for e, a in zip(examples, assignment) if a == fold]
        yield train, test


def cross_validate(examples: Sequence[LabeledExample],
                   k: int,
                   classes: Sequence[str],
                   seed: int,
                   text: pipeline.TextPipeline = pipeline.TextPipeline(),
                   n_per_class: int = DEFAULT_N_PER_CLASS,
                   config: TrainConfig = TrainConfig()) -> EvalReport:
    """
    Stratified k fold cross validation. Every fold trains on the other folds,
    including feature selection, and predicts its own examples. The report is
    computed over the union of all fold predictions.

    Trained on gold data this gives the gold baselines, with the text settings
    choosing the variant.

    Args:
        examples: The labeled corpus.
        k: The number of folds.
        classes: The classes.
        seed: The seed of the fold assignment.
        text: The text settings.
        n_per_class: The feature selection size per class.
        config: The solver settings.

    Returns:
        The report over all examples.

    Raises:
        CorpusError: If a class has fewer than k examples.
    """
    pairs: List[Tuple[str, str]] = []
    for fold, (train, test) in enumerate(iter_folds(examples, k, seed)):
        model = pipeline.fit(train, classes, text, n_per_class, config)
        predicted = pipeline.predict_examples(model, test)
        pairs.extend(zip((e.label for e in test), predicted))
        logger.info('Fold %d of %d: trained on %d, tested on %d.', fold + 1, k,
                    len(train), len(test))

    matrix = confusion(pairs, classes)
    return macro_report(
        matrix, {
            'variant': text.variant.value,
            'seed': seed,
            'folds': k,
            'corpus_size': len(examples)
        })


class CurvePoint(NamedTuple):
    size: int
    accuracy: float
    macro_f1: float
    seed: int


def learning_curve(examples: Sequence[LabeledExample],
                   sizes: Sequence[int],
                   test: Sequence[LabeledExample],
                   classes: Sequence[str],
                   seed: int,
                   text: pipeline.TextPipeline = pipeline.TextPipeline(),
                   n_per_class: int = DEFAULT_N_PER_CLASS,
                   config: TrainConfig = TrainConfig(),
                   imbalance_cap: Optional[Mapping[str, int]] = None
                   ) -> List[CurvePoint]:
    """
    Accuracy as a function of training size. For every size the training set is
    a balanced sample of size / |classes| examples per class, or the whole pool
    once size reaches it. The full pipeline is run on it independently of
    the other sizes.

    Args:
        examples: The training pool.
        sizes: The total training sizes.
        test: The fixed test set.
        classes: The classes.
        seed: The seed of the samples.
        text: The text settings.
        n_per_class: The feature selection size per class.
        config: The solver settings.
        imbalance_cap: Per class caps overriding the balanced cap, to study
            training on imbalanced data.

    Returns:
        One point per size, in input order.
    """
    groups = group_by_class(e for e in examples if e.label in set(classes))
    pool = OrderedDict((c, groups.get(c, [])) for c in classes)
    available = sum(len(g) for g in pool.values())

    points = []
    for size in sizes:
        if size >= available:
            if size > available:
                logger.warning(
                    'Training size %d exceeds the %d available examples; using all.',
                    size, available)
            cap = max(len(g) for g in pool.values())
        else:
            cap = max(1, size // len(classes))

        sample = balance_sample(pool, cap, seed, imbalance_cap)
        train = [e for group in sample.values() for e in group]
        model = pipeline.fit(train, classes, text, n_per_class, config)
        report = evaluate(model, test)

        points.append(CurvePoint(size, report.accuracy, report.macro.f1, seed))
        logger.info('Size %d: accuracy %.4f.', size, report.accuracy)

    return points


def write_curve_csv(points: Iterable[CurvePoint], writable: Any) -> None:
    """
    Write learning curve points as CSV with a size,accuracy,macro_f1,seed
    header.
    """
    writer = csv.writer(writable, lineterminator='\n')
    writer.writerow(CurvePoint._fields)
    for point in points:
        writer.writerow(point)
