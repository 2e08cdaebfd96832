"""
End to end runs on synthetic distantly supervised corpora. Every class has its
own indicative vocabulary; silver training posts are noisy (a fifth of them are
drawn from another class's vocabulary) while test posts are clean.
"""

import hashlib
import time

import numpy as np
import pytest

from pysilver.corpus import coarsen
from pysilver.evaluation import coarsen_matrix, evaluate, macro_report, random_baseline
from pysilver.pipeline import TextPipeline, fit, predict_examples
from pysilver.svm import TrainConfig
from pysilver.textproc import Variant
from pysilver.unit.example import LabeledExample
from pysilver.unit.scheme import ClassScheme

TRAIN_PER_CLASS = 2000
TEST_PER_CLASS = 100
PURITY = 0.8
CLASS_WORDS = 20
NOISE_WORDS = 99
N_PER_CLASS = 200
SEED = 2014
TIME_LIMIT_SECONDS = 120

pytestmark = pytest.mark.slow


def _slug(label):
    return ''.join(ch for ch in label.lower() if ch.isalpha())[:5]


def _post(rng, label, source, hashtags):
    words = [f'{_slug(source)}{k}' for k in rng.choice(CLASS_WORDS, size=3, replace=False)]
    noise = [f'noise{k}' for k in rng.integers(NOISE_WORDS, size=3)]
    if hashtags:
        words[0] = '#' + words[0]
    tokens = words + noise
    rng.shuffle(tokens)
    return LabeledExample(' '.join(tokens), label)


def _corpus(classes, per_class, purity, hashtags, seed):
    rng = np.random.default_rng(seed)
    examples = []
    for label in classes:
        for _ in range(per_class):
            source = label
            if rng.random() >= purity:
                source = classes[int(rng.integers(len(classes)))]
            examples.append(_post(rng, label, source, hashtags and rng.random() < 0.5))
    return examples


def _hash(path):
    h = hashlib.sha256()
    with open(path, 'rb') as f:
        h.update(f.read())
    return h.hexdigest()


@pytest.fixture(scope='module')
def classes():
    return ClassScheme.default().class_list


@pytest.fixture(scope='module')
def silver(classes):
    return (_corpus(classes, TRAIN_PER_CLASS, PURITY, True, SEED),
            _corpus(classes, TEST_PER_CLASS, 1.0, True, SEED + 1))


@pytest.fixture(scope='module')
def base_run(silver, classes):
    train, test = silver
    config = TrainConfig(seed=SEED)
    start = time.perf_counter()
    model = fit(train, classes, TextPipeline(Variant.BASE), N_PER_CLASS, config)
    report = evaluate(model, test)
    return model, report, time.perf_counter() - start


def test_separable_training_accuracy(classes):
    """
    Test that clean classes with disjoint vocabularies are learned exactly.
    """
    train = _corpus(classes, 30, 1.0, False, SEED)

    model = fit(train, classes, n_per_class=N_PER_CLASS)

    assert len(model.heads) == 14
    predicted = predict_examples(model, train)
    correct = sum(p == e.label for p, e in zip(predicted, train))
    assert correct / len(train) >= 0.99


def test_silver_accuracy(base_run, silver, classes):
    """
    Test that noisy silver labels still train a classifier far above chance.
    """
    _, test = silver
    _, report, _ = base_run

    assert report.accuracy >= 0.60
    assert random_baseline(test, classes, SEED).accuracy < 0.15


def test_hashtag_variant(base_run, silver, classes):
    """
    Test that duplicating hashtags does not hurt on hashtag rich data.
    """
    train, test = silver
    _, base, _ = base_run

    model = fit(train, classes, TextPipeline(Variant.H), N_PER_CLASS,
                TrainConfig(seed=SEED))
    report = evaluate(model, test)

    assert report.accuracy >= base.accuracy - 0.02


def test_coarse_accuracy(base_run):
    """
    Test that folding truth and predictions into coarse classes keeps or raises
    accuracy.
    """
    _, report, _ = base_run

    coarse = macro_report(coarsen_matrix(report.matrix, ClassScheme.default()))

    assert coarse.accuracy >= report.accuracy


def test_coarse_model(silver):
    """
    Test training directly on coarse labels.
    """
    scheme = ClassScheme.default()
    train, test = silver
    coarse_train = [coarsen(e, scheme) for e in train]
    coarse_test = [coarsen(e, scheme) for e in test]

    model = fit(coarse_train, scheme.coarse_list, n_per_class=N_PER_CLASS,
                config=TrainConfig(seed=SEED))

    assert model.class_list == ['AutoSport', 'Entertainment', 'NewsActivism', 'SciEdu']
    assert evaluate(model, coarse_test).accuracy >= 0.60


def test_deterministic(base_run, silver, classes, tmp_path):
    """
    Test that the same data and seed give a byte identical model and the same
    report.
    """
    train, test = silver
    model, report, _ = base_run

    again = fit(train, classes, TextPipeline(Variant.BASE), N_PER_CLASS,
                TrainConfig(seed=SEED))
    model.save(tmp_path / 'first.json')
    again.save(tmp_path / 'second.json')

    assert _hash(tmp_path / 'first.json') == _hash(tmp_path / 'second.json')
    assert evaluate(again, test).to_json() == report.to_json()


def test_training_time(base_run):
    """
    Test that fitting the full silver corpus and evaluating stays within two
    minutes.
    """
    _, _, elapsed = base_run

    assert elapsed < TIME_LIMIT_SECONDS
