"""
The experiment configuration: one JSON file whose sections configure every
command. Missing keys take built in defaults; command line flags override the
file.
"""

import json
import os
from typing import Any, Dict, List, Mapping, Optional, Union

from pysilver.exception import ParseError
from pysilver.features import DEFAULT_N_PER_CLASS
from pysilver.pipeline import TextPipeline
from pysilver.svm import TrainConfig
from pysilver.textproc import NormalizeOptions, Variant

PathLike = Union[str, bytes, os.PathLike]

_SECTIONS = ('paths', 'text', 'train', 'features', 'sampling', 'variant',
             'seed', 'coarse')


def _check_keys(section: str, obj: Any, allowed: Mapping[str, Any]) -> None:
    if not isinstance(obj, dict):
        raise ParseError(f'Config section {section} must be an object')
    unknown = set(obj) - set(allowed)
    if unknown:
        raise ParseError(f'Unknown keys in config section {section}: {sorted(unknown)}')


class PathsConfig:
    """
    Input and output locations. Unset outputs default to fixed names inside
    output_dir.
    """

    DEFAULTS: Dict[str, Optional[str]] = {
        'tweets': None,
        'videos': None,
        'scheme': None,
        'output_dir': '.',
        'corpus': None,
        'train': None,
        'test': None,
        'model': None,
        'gold': None,
        'later_test': None
    }

    _OUTPUT_NAMES = {
        'corpus': 'corpus.jsonl',
        'train': 'train.jsonl',
        'test': 'test.jsonl',
        'model': 'model.json'
    }

    def __init__(self, **paths: Optional[str]) -> None:
        self._paths: Dict[str, Optional[str]] = dict(self.DEFAULTS)
        self._paths.update(paths)

    def __getitem__(self, key: str) -> Optional[str]:
        value = self._paths[key]
        if value is None and key in self._OUTPUT_NAMES:
            return os.path.join(str(self._paths['output_dir']),
                                self._OUTPUT_NAMES[key])
        return value

    def output(self, name: str) -> str:
        """
        The location of an output file inside output_dir.
        """
        return os.path.join(str(self._paths['output_dir']), name)

    def to_json(self) -> Dict[str, Optional[str]]:
        return dict(self._paths)


class SamplingConfig:
    """
    Corpus sampling: the balanced per class cap, the per class holdout size,
    the number of cross validation folds, and the learning curve sizes.
    """

    __slots__ = ['cap', 'per_class_test', 'folds', 'curve_sizes', 'class_caps']

    def __init__(self,
                 cap: int = 100000,
                 per_class_test: int = 1000,
                 folds: int = 10,
                 curve_sizes: Optional[List[int]] = None,
                 class_caps: Optional[Dict[str, int]] = None) -> None:
        if cap < 1 or per_class_test < 1:
            raise ValueError('cap and per_class_test must be at least 1')
        if folds < 2:
            raise ValueError(f'folds must be at least 2, got {folds}')

        self.cap = cap
        self.per_class_test = per_class_test
        self.folds = folds
        self.curve_sizes = list(curve_sizes or [])
        self.class_caps = dict(class_caps or {})

    def to_json(self) -> Dict[str, Any]:
        return {
            'cap': self.cap,
            'per_class_test': self.per_class_test,
            'folds': self.folds,
            'curve_sizes': list(self.curve_sizes),
            'class_caps': dict(self.class_caps)
        }


class ExperimentConfig:
    """
    Every setting of an experiment. The seed drives sampling, splitting and fold
    assignment and is recorded in every output.
    """
    def __init__(self,
                 paths: Optional[PathsConfig] = None,
                 text: NormalizeOptions = NormalizeOptions(),
                 train: Optional[TrainConfig] = None,
                 n_per_class: int = DEFAULT_N_PER_CLASS,
                 sampling: Optional[SamplingConfig] = None,
                 variant: Variant = Variant.BASE,
                 seed: int = 0,
                 coarse: bool = False) -> None:
        self.paths = paths or PathsConfig()
        self.text = text
        self.train = train or TrainConfig(seed=seed)
        self.n_per_class = n_per_class
        self.sampling = sampling or SamplingConfig()
        self.variant = Variant(variant)
        self.seed = seed
        self.coarse = coarse

    @property
    def text_pipeline(self) -> TextPipeline:
        return TextPipeline(self.variant, self.text)

    def override(self,
                 seed: Optional[int] = None,
                 variant: Optional[str] = None,
                 coarse: Optional[bool] = None) -> 'ExperimentConfig':
        """
        Apply command line overrides in place. None leaves a setting as is.

        Returns:
            This config.
        """
        if seed is not None:
            self.seed = seed
            self.train.seed = seed
        if variant is not None:
            self.variant = Variant(variant)
        if coarse:
            self.coarse = True

        return self

    @classmethod
    def from_json(cls, obj: Mapping[str, Any]) -> 'ExperimentConfig':
        """
        Create a config from its JSON object.

        Raises:
            ParseError: If there are unknown keys or invalid values.
        """
        _check_keys('root', obj, dict.fromkeys(_SECTIONS))

        paths = obj.get('paths', {})
        _check_keys('paths', paths, PathsConfig.DEFAULTS)
        features = obj.get('features', {})
        _check_keys('features', features, {'n_per_class': None})
        sampling = obj.get('sampling', {})
        _check_keys('sampling', sampling, dict.fromkeys(SamplingConfig.__slots__))

        seed = obj.get('seed', 0)
        train = dict(obj.get('train', {}))
        train.setdefault('seed', seed)

        try:
            return cls(paths=PathsConfig(**paths),
                       text=NormalizeOptions.from_json(obj.get('text', {})),
                       train=TrainConfig.from_json(train),
                       n_per_class=int(features.get('n_per_class', DEFAULT_N_PER_CLASS)),
                       sampling=SamplingConfig(**sampling),
                       variant=Variant(obj.get('variant', Variant.BASE.value)),
                       seed=int(seed),
                       coarse=bool(obj.get('coarse', False)))
        except (TypeError, ValueError) as err:
            if isinstance(err, ParseError):
                raise
            raise ParseError(f'Invalid config: {err}') from err

    @classmethod
    def load(cls, path: PathLike) -> 'ExperimentConfig':
        """
        Read a config file.

        Raises:
            IOError: If the file cannot be opened.
            ParseError: If the file is not a valid config.
        """
        with open(path, encoding='utf-8') as f:
            try:
                obj = json.load(f)
            except json.JSONDecodeError as err:
                raise ParseError(f'Config file {path!r} is not valid JSON') from err

        return cls.from_json(obj)

    def to_json(self) -> Dict[str, Any]:
        return {
            'paths': self.paths.to_json(),
            'text': self.text.to_json(),
            'train': self.train.to_json(),
            'features': {'n_per_class': self.n_per_class},
            'sampling': self.sampling.to_json(),
            'variant': self.variant.value,
            'seed': self.seed,
            'coarse': self.coarse
        }
