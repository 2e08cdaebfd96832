import os

import pytest

from pysilver.config import ExperimentConfig, PathsConfig, SamplingConfig
from pysilver.exception import ParseError
from pysilver.textproc import Variant


def test_defaults():
    """
    Test the configuration of an empty config file.
    """
    config = ExperimentConfig.from_json({})

    assert config.seed == 0
    assert config.variant == Variant.BASE
    assert config.n_per_class == 10000
    assert config.train.C == 1.0
    assert config.sampling.cap == 100000
    assert config.sampling.per_class_test == 1000
    assert config.sampling.folds == 10
    assert not config.coarse


def test_sections():
    """
    Test reading every section.
    """
    config = ExperimentConfig.from_json({
        'paths': {'output_dir': 'runs', 'gold': 'gold.jsonl'},
        'text': {'max_run': 3},
        'train': {'C': 0.5},
        'features': {'n_per_class': 500},
        'sampling': {'cap': 2000, 'curve_sizes': [100, 200]},
        'variant': 'vh',
        'seed': 12,
        'coarse': True
    })

    assert config.paths['gold'] == 'gold.jsonl'
    assert config.text.max_run == 3
    assert config.train.C == 0.5
    assert config.train.seed == 12
    assert config.n_per_class == 500
    assert config.sampling.curve_sizes == [100, 200]
    assert config.text_pipeline.variant == Variant.VH
    assert config.coarse
    assert ExperimentConfig.from_json(config.to_json()).to_json() == config.to_json()


@pytest.mark.parametrize('obj', [
    {'sampel': {}},
    {'paths': {'tweet': 'x'}},
    {'train': {'c': 1}},
    {'text': {'lowercase': True}},
    {'features': {'n': 3}},
    {'variant': 'hv'},
    {'sampling': {'folds': 1}},
    {'paths': []},
])
def test_invalid(obj):
    """
    Test that unknown keys and invalid values are parse errors.
    """
    with pytest.raises(ParseError):
        ExperimentConfig.from_json(obj)


def test_override():
    """
    Test that command line overrides replace file settings.
    """
    config = ExperimentConfig.from_json({'seed': 1, 'variant': 'h'})

    config.override(seed=5, variant='v', coarse=True)

    assert config.seed == 5
    assert config.train.seed == 5
    assert config.variant == Variant.V
    assert config.coarse

    config.override()
    assert config.seed == 5
    assert config.coarse


def test_output_paths():
    """
    Test that unset outputs land in the output directory.
    """
    paths = PathsConfig(output_dir='runs', test='held_out.jsonl')

    assert paths['model'] == os.path.join('runs', 'model.json')
    assert paths['corpus'] == os.path.join('runs', 'corpus.jsonl')
    assert paths['test'] == 'held_out.jsonl'
    assert paths['gold'] is None
    assert paths.output('report.json') == os.path.join('runs', 'report.json')


def test_sampling_bounds():
    """
    Test the sampling preconditions.
    """
    with pytest.raises(ValueError):
        SamplingConfig(cap=0)
    with pytest.raises(ValueError):
        SamplingConfig(folds=1)
