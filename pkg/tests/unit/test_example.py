import pytest

from pysilver.exception import ParseError
from pysilver.unit.example import LabeledExample


def test_from_json_full():
    """
    Test that an example with every field is created from JSON.
    """
    obj = {
        'text': 'Best song ever',
        'label': 'Music',
        'video_id': 'dQw4w9WgXcQ',
        'title': 'Never Gonna Give You Up',
        'timestamp': 1396310400
    }
    example = LabeledExample.from_json(obj)

    assert example.text == 'Best song ever'
    assert example.label == 'Music'
    assert example.video_id == 'dQw4w9WgXcQ'
    assert example.title == 'Never Gonna Give You Up'
    assert example.timestamp == 1396310400
    assert example.to_json() == obj


def test_to_json_omits_absent():
    """
    Test that absent optional fields are not written.
    """
    example = LabeledExample('What a goal!', 'Sports')

    assert example.to_json() == {'text': 'What a goal!', 'label': 'Sports'}


def test_null_optional_fields():
    """
    Test that optional fields given as null are absent.
    """
    example = LabeledExample.from_json({
        'text': 'x',
        'label': 'Music',
        'title': None
    })

    assert example.title is None


def test_empty_text_or_label():
    """
    Test that examples need nonempty text and label.
    """
    with pytest.raises(ParseError):
        LabeledExample('', 'Music')

    with pytest.raises(ParseError):
        LabeledExample('text', '')

    with pytest.raises(ParseError):
        LabeledExample.from_json({'text': 'text'})


def test_relabel():
    """
    Test that relabeling creates a new example and keeps every other field.
    """
    example = LabeledExample('Best song ever', 'Music', 'dQw4w9WgXcQ', 'Title', 5)
    coarse = example.relabel('Entertainment')

    assert coarse.label == 'Entertainment'
    assert coarse.text == example.text
    assert coarse.video_id == example.video_id
    assert coarse.title == example.title
    assert coarse.timestamp == example.timestamp
    assert example.label == 'Music'


def test_equality_and_hash():
    """
    Test that equal examples hash equally.
    """
    a = LabeledExample('x', 'Music', timestamp=3)
    b = LabeledExample('x', 'Music', timestamp=3)
    c = LabeledExample('x', 'Sports', timestamp=3)

    assert a == b
    assert hash(a) == hash(b)
    assert a != c
    assert len({a, b, c}) == 2
