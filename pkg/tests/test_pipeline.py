import pytest

from pysilver.exception import ParseError
from pysilver.pipeline import (TextPipeline, fit, predict_examples, predict_texts,
                               text_pipeline, time_window)
from pysilver.svm import MulticlassModel, TrainConfig
from pysilver.textproc import NormalizeOptions, Variant
from pysilver.unit.example import LabeledExample


def _corpus():
    return [
        LabeledExample('new song out now #music', 'Music', 'a', 'Album Teaser', 30),
        LabeledExample('that guitar solo', 'Music', 'b', 'Live Concert', 10),
        LabeledExample('listen to this song', 'Music', timestamp=20),
        LabeledExample('what a goal #football', 'Sports', 'c', 'Cup Highlights'),
        LabeledExample('the match tonight', 'Sports', timestamp=50),
        LabeledExample('great goal by the striker', 'Sports'),
    ]


def test_text_pipeline_tokens():
    """
    Test that titles only enrich training posts.
    """
    text = TextPipeline(Variant.VH)

    assert text.tokens('Nice #Goal', 'Cup Final', training=True) == [
        'nice', '#goal', 'cup', 'final', 'goal'
    ]
    assert text.tokens('Nice #Goal', 'Cup Final') == ['nice', '#goal', 'goal']


def test_text_pipeline_json():
    """
    Test reading and writing text settings.
    """
    text = TextPipeline(Variant.H, NormalizeOptions(max_run=3))

    assert TextPipeline.from_json(text.to_json()) == text
    assert TextPipeline.from_json({}) == TextPipeline()
    with pytest.raises(ParseError):
        TextPipeline.from_json({'variant': 'x'})


def test_time_window():
    """
    Test the time window of examples with and without timestamps.
    """
    assert time_window(_corpus()) == [10, 50]
    assert time_window([LabeledExample('x', 'Music')]) is None


def test_fit():
    """
    Test that a fitted model carries its text settings and training facts, and
    recognizes its training posts.
    """
    corpus = _corpus()

    model = fit(corpus, ['Music', 'Sports'], TextPipeline(Variant.V), 50,
                TrainConfig(C=10.0, seed=4))

    assert model.class_list == ['Music', 'Sports']
    assert model.pipeline == {'variant': 'v', 'text': NormalizeOptions().to_json()}
    assert model.metadata == {'training_size': 6, 'train_window': [10, 50]}
    assert text_pipeline(model).variant == Variant.V
    assert 'teaser' in model.feature_space
    untitled = [e for e in corpus if e.title is None]
    assert predict_examples(model, untitled) == [e.label for e in untitled]


def test_predict_texts(tmp_path):
    """
    Test that a saved and loaded model predicts raw text like the original.
    """
    model = fit(_corpus(), ['Music', 'Sports'], n_per_class=50)
    path = tmp_path / 'model.json'
    model.save(path)
    texts = ['a new song', 'goal!', 'nothing known here', '']

    predicted = predict_texts(MulticlassModel.load(path), texts)

    assert predicted == predict_texts(model, texts)
    assert predicted[:2] == ['Music', 'Sports']
    assert predict_texts(model, []) == []
