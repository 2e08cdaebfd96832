import io

import pytest

from pysilver import load_examples_from_file, load_examples_from_string, \
    iter_examples_from_file, iter_tweets_from_file, iter_tweets_from_resource, \
    load_video_map
from pysilver._parser import ReadStats
from pysilver.exception import ParseError, SchemeError
from pysilver.load import iter_examples_from_tsv, iter_videos_from_file, write_records
from pysilver.unit.dataset import Dataset
from tests.util import fixture_location


def test_iter_tweets_from_file():
    """
    Test that a tweets file is streamed in file order.
    """
    tweets = list(iter_tweets_from_file(fixture_location('tweets.jsonl')))

    assert len(tweets) == 6
    assert [t.id for t in tweets] == ['1001', '1002', '1003', '1004', '1005', '1006']
    assert tweets[5].urls == ['https://m.youtube.com/watch?v=abcDEF12345']


def test_iter_tweets_from_resource():
    """
    Test that tweets can be read from any line iterator.
    """
    with open(fixture_location('tweets.jsonl'), encoding='utf-8') as f:
        from_resource = list(iter_tweets_from_resource(f))
    from_file = list(iter_tweets_from_file(fixture_location('tweets.jsonl')))

    assert from_resource == from_file


def test_strict_read_fails_with_line():
    """
    Test that strict reading stops at the first malformed line and names it.
    """
    with pytest.raises(ParseError) as excinfo:
        list(iter_tweets_from_file(fixture_location('malformed_tweets.jsonl')))

    assert 'Line 2' in str(excinfo.value)


def test_lenient_read_counts_malformed():
    """
    Test that lenient reading skips and counts malformed lines, ignoring blank
    ones.
    """
    stats = ReadStats()
    tweets = list(
        iter_tweets_from_file(fixture_location('malformed_tweets.jsonl'),
                              lenient=True,
                              stats=stats))

    assert [t.id for t in tweets] == ['2001', '2004']
    assert stats.records == 2
    assert stats.malformed == 2
    assert stats.malformed_lines == [2, 4]


def test_load_video_map():
    """
    Test that the video map is keyed by video id.
    """
    videos = load_video_map(fixture_location('videos.jsonl'))

    assert sorted(videos) == ['abcDEF12345', 'dQw4w9WgXcQ', 'zyxWVU98765']
    assert videos['zyxWVU98765'].category == 'People & Blogs'


def test_video_map_last_wins(tmp_path):
    """
    Test that the last record of a repeated video id wins.
    """
    path = tmp_path / 'videos.jsonl'
    path.write_text(
        '{"video_id": "dQw4w9WgXcQ", "title": "a", "category": "Music"}\n'
        '{"video_id": "dQw4w9WgXcQ", "title": "b", "category": "Comedy"}\n',
        encoding='utf-8')

    videos = load_video_map(path)

    assert len(videos) == 1
    assert videos['dQw4w9WgXcQ'].category == 'Comedy'
    assert len(list(iter_videos_from_file(path))) == 2


def test_load_examples():
    """
    Test that a labeled corpus loads into a Dataset from a file or a string.
    """
    dataset = load_examples_from_file(fixture_location('examples.jsonl'))

    with open(fixture_location('examples.jsonl'), encoding='utf-8') as f:
        from_string = load_examples_from_string(f.read())

    assert isinstance(dataset, Dataset)
    assert dataset.labels() == ['Music', 'Sports', 'Science&Technology']
    assert dataset[0].title == 'Never Gonna Give You Up'
    assert dataset[1].timestamp is None
    assert list(from_string) == list(dataset)


def test_examples_outside_classes():
    """
    Test that restricting labels to a set of classes names the offending line.
    """
    with pytest.raises(SchemeError) as excinfo:
        list(
            iter_examples_from_file(fixture_location('bad_label.jsonl'),
                                    classes={'Music', 'Sports'}))

    assert 'Line 2' in str(excinfo.value)


def test_examples_from_tsv():
    """
    Test that a TSV gold file converts to examples, skipping the header and
    blank lines.
    """
    examples = list(iter_examples_from_tsv(fixture_location('gold.tsv')))

    assert [(e.text, e.label) for e in examples] == [
        ('Best song ever #music', 'Music'),
        ('What a goal!', 'Sports'),
        ('New phone review', 'Science&Technology'),
    ]


def test_tsv_errors():
    """
    Test that TSV lines with the wrong number of columns or unknown labels fail
    with their line number.
    """
    with pytest.raises(ParseError) as excinfo:
        list(iter_examples_from_tsv(fixture_location('bad_columns.tsv')))
    assert 'Line 1' in str(excinfo.value)

    with pytest.raises(SchemeError) as excinfo:
        list(iter_examples_from_tsv(fixture_location('gold.tsv'), classes={'Music'}))
    assert 'Line 3' in str(excinfo.value)


def test_write_records():
    """
    Test that records are written one JSON object per line.
    """
    dataset = load_examples_from_file(fixture_location('examples.jsonl'))
    out = io.StringIO()

    n = write_records(dataset, out)

    assert n == 3
    assert out.getvalue().count('\n') == 3
    assert list(load_examples_from_string(out.getvalue())) == list(dataset)
