import pytest

from pysilver.exception import ParseError
from pysilver.unit.tweet import TweetRecord
from pysilver.unit.video import VideoMeta


def test_tweet_from_json():
    """
    Test that a tweet is created from its JSON-lines object.
    """
    obj = {
        'id': '1001',
        'text': 'Best song ever https://youtu.be/dQw4w9WgXcQ',
        'lang': 'en',
        'timestamp': 1396310400,
        'urls': ['https://youtu.be/dQw4w9WgXcQ']
    }
    tweet = TweetRecord.from_json(obj)

    assert tweet.id == '1001'
    assert tweet.text == 'Best song ever https://youtu.be/dQw4w9WgXcQ'
    assert tweet.lang == 'en'
    assert tweet.timestamp == 1396310400
    assert tweet.urls == ['https://youtu.be/dQw4w9WgXcQ']
    assert tweet.to_json() == obj


def test_tweet_urls_optional():
    """
    Test that a tweet without a urls key has an empty url list.
    """
    tweet = TweetRecord.from_json({
        'id': '7',
        'text': 'hello',
        'lang': 'en',
        'timestamp': 0
    })

    assert tweet.urls == []


def test_tweet_urls_copy():
    """
    Test that the urls property cannot be used to change the tweet.
    """
    tweet = TweetRecord('7', 'hello', urls=['http://a.example'])
    tweet.urls.append('http://b.example')

    assert tweet.urls == ['http://a.example']


def test_tweet_missing_field():
    """
    Test that a missing required field is a parse error.
    """
    with pytest.raises(ParseError):
        TweetRecord.from_json({'id': '7', 'lang': 'en', 'timestamp': 0})


def test_tweet_wrong_types():
    """
    Test that fields of the wrong type are parse errors, including a boolean
    timestamp.
    """
    with pytest.raises(ParseError):
        TweetRecord.from_json({'id': 7, 'text': 'x', 'lang': 'en', 'timestamp': 0})

    with pytest.raises(ParseError):
        TweetRecord.from_json({'id': '7', 'text': 'x', 'lang': 'en', 'timestamp': True})

    with pytest.raises(ParseError):
        TweetRecord.from_json({
            'id': '7',
            'text': 'x',
            'lang': 'en',
            'timestamp': 0,
            'urls': 'http://a.example'
        })


def test_tweet_empty_text():
    """
    Test that a tweet needs text.
    """
    with pytest.raises(ParseError):
        TweetRecord('7', '')


def test_video_from_json():
    """
    Test that a video is created from its JSON-lines object.
    """
    video = VideoMeta.from_json({
        'video_id': 'dQw4w9WgXcQ',
        'title': 'Never Gonna Give You Up',
        'category': 'Music'
    })

    assert video.video_id == 'dQw4w9WgXcQ'
    assert video.title == 'Never Gonna Give You Up'
    assert video.category == 'Music'


def test_video_title_optional():
    """
    Test that a video without a title has an empty title.
    """
    video = VideoMeta.from_json({'video_id': 'dQw4w9WgXcQ', 'category': 'Music'})

    assert video.title == ''


def test_video_id_validation():
    """
    Test that only 11 character ids from the id alphabet are accepted.
    """
    assert VideoMeta.is_video_id('abc_DEF-123')
    assert not VideoMeta.is_video_id('abc_DEF-12')
    assert not VideoMeta.is_video_id('abc_DEF-1234')
    assert not VideoMeta.is_video_id('abc DEF.123')

    with pytest.raises(ParseError):
        VideoMeta('short', '', 'Music')
