import io

import numpy as np
import pytest

from pysilver.evaluation import (ConfusionMatrix, coarsen_matrix, confusion,
                                 cross_validate, drift_eval, evaluate, iter_folds,
                                 learning_curve, macro_report, micro_metrics,
                                 per_class_metrics,
                                 random_baseline, read_matrix_tsv,
                                 silver_gold_eval, stratified_folds,
                                 write_curve_csv)
from pysilver.exception import CorpusError, EvaluationError, ParseError
from pysilver.pipeline import fit
from pysilver.svm import TrainConfig
from pysilver.unit.example import LabeledExample
from pysilver.unit.scheme import ClassScheme

from tests.util import fixture_location

# Rounded precision, recall, and F1 of every class of the published matrix.
PUBLISHED = {
    'Autos&Vehicles': (0.77, 0.92, 0.84),
    'Comedy': (0.80, 0.33, 0.46),
    'Education': (0.59, 0.24, 0.35),
    'Entertainment': (0.57, 0.32, 0.41),
    'Film&Animation': (0.65, 0.47, 0.55),
    'Gaming': (0.78, 0.73, 0.75),
    'HowTo&Style': (0.66, 0.69, 0.67),
    'Music': (0.49, 0.65, 0.56),
    'News&Politics': (0.37, 0.55, 0.44),
    'Nonprofits&Activism': (0.63, 0.34, 0.44),
    'Pets&Animals': (0.70, 0.91, 0.79),
    'Science&Technology': (0.43, 0.61, 0.50),
    'Sports': (0.58, 0.76, 0.66),
    'Travel&Events': (0.65, 0.71, 0.68),
}

# Half of the last printed digit, with room for values that round half up.
ROUNDING = 0.005 + 1e-9

WORDS = {
    'Music': ['song', 'album', 'concert', 'guitar'],
    'Sports': ['goal', 'match', 'league', 'coach'],
    'Gaming': ['level', 'boss', 'console', 'quest'],
}


def _examples(per_class, seed=0, offset=0):
    rng = np.random.default_rng(seed)
    examples = []
    for label, words in WORDS.items():
        for i in range(per_class):
            picked = rng.choice(words, size=3, replace=False).tolist()
            examples.append(
                LabeledExample(' '.join(picked + ['today']), label,
                               timestamp=offset + i))
    return examples


def test_published_matrix_metrics():
    """
    Test that the published matrix gives back its published metrics.
    """
    matrix = read_matrix_tsv(fixture_location('published_matrix.tsv'))

    assert matrix.class_list == ClassScheme.default().class_list
    assert matrix.total == 1617
    assert matrix.trace == 988

    metrics = per_class_metrics(matrix)
    for label, expected in PUBLISHED.items():
        assert tuple(metrics[label]) == pytest.approx(expected, abs=ROUNDING)

    report = macro_report(matrix)
    assert report.accuracy == pytest.approx(0.611, abs=0.001)


def test_small_matrix():
    """
    Test metrics of a symmetric two class matrix.
    """
    report = macro_report(ConfusionMatrix(['A', 'B'], [[3, 1], [1, 3]]))

    assert report.accuracy == 0.75
    assert tuple(report.macro) == pytest.approx((0.75, 0.75, 0.75))
    assert tuple(report.per_class['A']) == pytest.approx((0.75, 0.75, 0.75))


def test_identity_and_empty_matrices():
    """
    Test perfect predictions, and that zero denominators give 0.
    """
    perfect = macro_report(ConfusionMatrix(['A', 'B'], [[5, 0], [0, 2]]))
    assert perfect.accuracy == 1.0
    assert tuple(perfect.macro) == (1.0, 1.0, 1.0)

    empty = macro_report(ConfusionMatrix(['A', 'B'], [[0, 0], [0, 0]]))
    assert empty.accuracy == 0.0
    assert tuple(empty.macro) == (0.0, 0.0, 0.0)

    never_predicted = per_class_metrics(ConfusionMatrix(['A', 'B'], [[2, 0], [3, 0]]))
    assert tuple(never_predicted['B']) == (0.0, 0.0, 0.0)


def test_matrix_validation():
    """
    Test that malformed counts are rejected.
    """
    with pytest.raises(EvaluationError):
        ConfusionMatrix(['A', 'B'], [[1, 2, 3]])
    with pytest.raises(EvaluationError):
        ConfusionMatrix(['A'], [[-1]])
    with pytest.raises(EvaluationError):
        ConfusionMatrix(['A', 'A'], [[1, 0], [0, 1]])


def test_metrics_permutation_invariant():
    """
    Test that reordering classes changes no class's metrics and no aggregate.
    """
    matrix = read_matrix_tsv(fixture_location('published_matrix.tsv'))
    order = list(reversed(matrix.class_list))

    reordered = matrix.reorder(order)
    before = macro_report(matrix)
    after = macro_report(reordered)

    assert reordered.count('Music', 'Sports') == matrix.count('Music', 'Sports')
    assert after.accuracy == before.accuracy
    assert tuple(after.macro) == pytest.approx(tuple(before.macro))
    for label in order:
        assert after.per_class[label] == before.per_class[label]


def test_matrix_tsv_round_trip():
    """
    Test that a written matrix reads back equal.
    """
    matrix = ConfusionMatrix(['A', 'B'], [[3, 1], [0, 2]])
    buffer = io.StringIO()

    matrix.write_tsv(buffer)

    assert buffer.getvalue() == '\tA\tB\nA\t3\t1\nB\t0\t2\n'


def test_read_matrix_bad_row(tmp_path):
    """
    Test that a row of the wrong width or class is an error naming its line.
    """
    path = tmp_path / 'matrix.tsv'
    path.write_text('\tA\tB\nA\t1\t2\nB\t3\n', encoding='utf-8')
    with pytest.raises(ParseError, match='Line 3'):
        read_matrix_tsv(path)

    path.write_text('\tA\tB\nB\t1\t2\nA\t3\t4\n', encoding='utf-8')
    with pytest.raises(ParseError, match='Line 2'):
        read_matrix_tsv(path)


def test_confusion_unknown_class():
    """
    Test that counting a class outside the matrix is an error.
    """
    with pytest.raises(EvaluationError):
        confusion([('A', 'C')], ['A', 'B'])


def test_coarsen_published_matrix():
    """
    Test that folding into coarse classes keeps every count and cannot lower
    accuracy.
    """
    matrix = read_matrix_tsv(fixture_location('published_matrix.tsv'))

    coarse = coarsen_matrix(matrix, ClassScheme.default())

    assert coarse.class_list == ['AutoSport', 'Entertainment', 'NewsActivism', 'SciEdu']
    assert coarse.total == matrix.total
    assert coarse.count('AutoSport', 'AutoSport') == 136 + 1 + 8 + 99
    assert macro_report(coarse).accuracy >= 0.611


def test_random_baseline():
    """
    Test that random predictions are right about once per class.
    """
    classes = ClassScheme.default().class_list
    test = [LabeledExample('x', classes[i % len(classes)]) for i in range(5000)]

    report = random_baseline(test, classes, 3)

    assert report.accuracy == pytest.approx(1 / 14, abs=0.02)
    assert report.matrix.total == 5000
    assert random_baseline(test, classes, 3).matrix == report.matrix


def test_stratified_folds():
    """
    Test that folds partition the corpus, spread every class evenly, and depend
    only on the seed.
    """
    examples = _examples(10)

    assignment = stratified_folds(examples, 5, 1)

    assert len(assignment) == len(examples)
    assert stratified_folds(examples, 5, 1) == assignment
    for label in WORDS:
        folds = [a for e, a in zip(examples, assignment) if e.label == label]
        assert sorted(folds) == sorted(list(range(5)) * 2)


def test_stratified_folds_errors():
    """
    Test the fold count and class size preconditions.
    """
    examples = _examples(3)

    with pytest.raises(ValueError):
        stratified_folds(examples, 1, 0)
    with pytest.raises(CorpusError, match='needs at least 4'):
        stratified_folds(examples, 4, 0)


def test_iter_folds_no_leak():
    """
    Test that no example is both trained on and tested on in a fold, and that
    every example is tested exactly once.
    """
    examples = _examples(6)
    tested = []

    for train, test in iter_folds(examples, 3, 2):
        assert len(train) + len(test) == len(examples)
        assert not {id(e) for e in train} & {id(e) for e in test}
        tested.extend(id(e) for e in test)

    assert sorted(tested) == sorted(id(e) for e in examples)


def test_cross_validate():
    """
    Test that cross validation predicts every example once.
    """
    examples = _examples(6)

    report = cross_validate(examples, 3, list(WORDS), 0, n_per_class=5)

    assert report.matrix.total == len(examples)
    assert report.metadata['folds'] == 3
    assert report.metadata['variant'] == 'base'
    assert report.accuracy > 0.9


def test_evaluate_and_drift():
    """
    Test held out and later window evaluation, including their metadata.
    """
    train = _examples(8, seed=1)
    later = _examples(4, seed=2, offset=100)
    model = fit(train, list(WORDS), n_per_class=5, config=TrainConfig(seed=9))

    report = evaluate(model, later)
    assert report.accuracy > 0.9
    assert report.metadata['seed'] == 9
    assert report.metadata['training_size'] == 24
    assert report.metadata['test_size'] == 12

    drift = drift_eval(model, later)
    assert drift.metadata['train_window'] == [0, 7]
    assert drift.metadata['test_window'] == [100, 103]

    reports = silver_gold_eval(model, {'silver': later, 'gold': later[:3]})
    assert list(reports) == ['silver', 'gold']
    assert reports['gold'].metadata['test_set'] == 'gold'


def test_evaluate_empty():
    """
    Test that an empty test set is an error.
    """
    model = fit(_examples(3), list(WORDS), n_per_class=5)

    with pytest.raises(EvaluationError):
        evaluate(model, [])
    with pytest.raises(EvaluationError):
        drift_eval(model, [])


def test_learning_curve(caplog):
    """
    Test that every size yields a point, and that a size above the pool uses
    the whole pool with a warning.
    """
    pool = _examples(10, seed=4)
    test = _examples(3, seed=5)

    points = learning_curve(pool, [6, 1000], test, list(WORDS), 0, n_per_class=5)

    assert [p.size for p in points] == [6, 1000]
    assert all(0.0 <= p.accuracy <= 1.0 for p in points)
    assert 'exceeds' in caplog.text

    buffer = io.StringIO()
    write_curve_csv(points, buffer)
    lines = buffer.getvalue().splitlines()
    assert lines[0] == 'size,accuracy,macro_f1,seed'
    assert lines[1].startswith('6,')
    assert len(lines) == 3


def test_micro_metrics_equal_accuracy():
    """
    Test that pooled precision and recall both equal accuracy when every
    example gets one prediction.
    """
    rng = np.random.default_rng(37)
    classes = ['a', 'b', 'c', 'd', 'e']
    for _ in range(200):
        n = int(rng.integers(1, 60))
        truth = rng.choice(classes, size=n).tolist()
        predicted = rng.choice(classes[:int(rng.integers(1, 6))], size=n).tolist()
        matrix = confusion(zip(truth, predicted), classes)

        micro = micro_metrics(matrix)
        accuracy = macro_report(matrix).accuracy

        assert micro.precision == pytest.approx(accuracy, abs=1e-12)
        assert micro.recall == pytest.approx(accuracy, abs=1e-12)
        assert micro.f1 == pytest.approx(accuracy, abs=1e-12)

    assert micro_metrics(ConfusionMatrix([], [])) == (0.0, 0.0, 0.0)


def test_learning_curve_whole_pool_imbalanced():
    """
    Test that a size equal to an imbalanced pool trains on every example, the
    same as fitting the pool directly.
    """
    pool = [e for e in _examples(10, seed=6)
            if e.label == 'Music' or (e.label == 'Sports' and e.timestamp < 4)
            or (e.label == 'Gaming' and e.timestamp < 6)]
    test = _examples(3, seed=7)
    classes = list(WORDS)

    points = learning_curve(pool, [len(pool)], test, classes, 0, n_per_class=5)
    direct = evaluate(fit(pool, classes, n_per_class=5), test)

    assert len(pool) == 20
    assert points[0].accuracy == direct.accuracy
    assert points[0].macro_f1 == direct.macro.f1
