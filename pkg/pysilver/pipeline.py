"""
Composes text processing, feature selection, and training into the two
operations the experiments are built from: fitting a model on labeled examples
and predicting the classes of raw posts with it.
"""

import logging
from collections import Counter
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence

from pysilver import features, svm
from pysilver.exception import ParseError
from pysilver.textproc import (DEFAULT_OPTIONS, NormalizeOptions, TokenList,
                               Variant, analyze)
from pysilver.unit.example import LabeledExample

logger = logging.getLogger(__name__)


class TextPipeline:
    """
    The text settings of a model: the variant and the normalization options.
    They are stored in the model file so prediction processes text the way
    training did.
    """

    __slots__ = ['variant', 'options']

    def __init__(self,
                 variant: Variant = Variant.BASE,
                 options: NormalizeOptions = DEFAULT_OPTIONS) -> None:
        self.variant = Variant(variant)
        self.options = options

    def tokens(self,
               text: str,
               title: Optional[str] = None,
               training: bool = False) -> TokenList:
        """
        The tokens of a post under these settings.

        Args:
            text: The raw text.
            title: The linked video's title. Only used when training.
            training: Whether the post is a training example.

        Returns:
            The post's tokens.
        """
        return analyze(text, self.variant, title, self.options, training)

    def to_json(self) -> Dict[str, Any]:
        return {'variant': self.variant.value, 'text': self.options.to_json()}

    @classmethod
    def from_json(cls, obj: Mapping[str, Any]) -> 'TextPipeline':
        """
        Create a TextPipeline from its JSON object. Missing keys take defaults.

        Raises:
            ParseError: If the variant is unknown or the options are invalid.
        """
        try:
            variant = Variant(obj.get('variant', Variant.BASE.value))
        except ValueError as err:
            raise ParseError(f'Unknown variant {obj.get("variant")!r}') from err

        options = NormalizeOptions.from_json(obj.get('text', {}))
        return cls(variant, options)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TextPipeline):
            return NotImplemented
        return self.to_json() == other.to_json()


def time_window(examples: Iterable[LabeledExample]) -> Optional[List[int]]:
    """
    The [first, last] timestamps of the examples, or None if none has one.
    """
    stamps = [e.timestamp for e in examples if e.timestamp is not None]
    if not stamps:
        return None
    return [min(stamps), max(stamps)]


def fit(examples: Sequence[LabeledExample],
        classes: Sequence[str],
        text: TextPipeline = TextPipeline(),
        n_per_class: int = features.DEFAULT_N_PER_CLASS,
        config: svm.TrainConfig = svm.TrainConfig()) -> svm.MulticlassModel:
    """
    Train a model on labeled examples: tokenize with the variant's training
    pipeline, select features on these examples only, and train one head per
    class.

    Args:
        examples: The training examples.
        classes: The classes to train heads for, in order.
        text: The text settings.
        n_per_class: The feature selection size per class.
        config: The solver settings.

    Returns:
        The trained model, carrying its text settings and training metadata.

    Raises:
        TrainingError: If a class has no examples, naming it.
    """
    documents = [text.tokens(e.text, e.title, training=True) for e in examples]
    labels = [e.label for e in examples]

    counts = features.count(zip(documents, labels))
    space = features.select_round_robin(counts, classes, n_per_class)
    vectors = [features.vectorize(tokens, space) for tokens in documents]

    sizes = Counter(labels)
    logger.info('Selected %d terms from a vocabulary of %d.', len(space),
                len(counts.df_t))
    logger.info('Training sizes: %s.',
                ', '.join(f'{c}={sizes[c]}' for c in classes))

    model = svm.train_ovr(list(zip(vectors, labels)), classes, space, config)
    model.pipeline = text.to_json()
    model.metadata = {
        'training_size': len(examples),
        'train_window': time_window(examples)
    }

    return model


def text_pipeline(model: svm.MulticlassModel) -> TextPipeline:
    """
    The text settings a model was trained with.
    """
    return TextPipeline.from_json(model.pipeline)


def predict_texts(model: svm.MulticlassModel, texts: Iterable[str]) -> List[str]:
    """
    Predict the class of raw posts. Title enrichment is never applied.

    Args:
        model: The trained model.
        texts: The raw texts.

    Returns:
        The predicted classes, in input order.
    """
    text = text_pipeline(model)
    X = features.vectorize_corpus((text.tokens(t) for t in texts),
                                  model.feature_space)
    return svm.predict_matrix(model, X)


def predict_examples(model: svm.MulticlassModel,
                     examples: Iterable[LabeledExample]) -> List[str]:
    """
    Predict the class of examples from their text alone.
    """
    return predict_texts(model, (e.text for e in examples))
