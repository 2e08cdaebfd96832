"""
Defines the TweetRecord type, the harvested unit of a distant supervision
corpus: a short social post that may link one or more videos.
"""

from typing import Any, Dict, List, Mapping, Optional, Sequence

from pysilver.exception import ParseError
from pysilver.serializable import Serializable


def _require(obj: Mapping[str, Any], key: str, kind: type) -> Any:
    """
    Fetch a required key from a parsed JSON object and check its type.

    Args:
        obj: The parsed JSON object.
        key: The key that must be present.
        kind: The expected python type of the value.

    Returns:
        The value under the key.

    Raises:
        ParseError: If the key is missing or the value has the wrong type.
    """
    try:
        value = obj[key]
    except KeyError as err:
        raise ParseError(f'Missing required field "{key}"') from err

    # bool is an int subclass, and is never a valid timestamp.
    if not isinstance(value, kind) or (kind is int
                                       and isinstance(value, bool)):
        raise ParseError(
            f'Field "{key}" must be of type {kind.__name__}, got {value!r}')

    return value


class TweetRecord(Serializable):
    """
    A raw ingested post. The id must be nonempty and the text must be nonempty.
    URLs may be given explicitly in the urls list and may also appear inline in
    the text; both are scanned when linking the tweet to videos.
    """

    __slots__ = ['_id', '_text', '_lang', '_timestamp', '_urls']

    def __init__(self,
                 tweet_id: str,
                 text: str,
                 lang: str = '',
                 timestamp: int = 0,
                 urls: Optional[Sequence[str]] = None) -> None:
        """
        Create a TweetRecord.

        Args:
            tweet_id: The unique id of the tweet.
            text: The text of the tweet.
            lang: The language code of the tweet. This is trusted as given.
            timestamp: UTC epoch seconds of the tweet.
            urls: The expanded URLs attached to the tweet, in order.

        Raises:
            ParseError: If the id or text is empty.
        """
        if not tweet_id:
            raise ParseError('Tweet id cannot be empty')
        if not text:
            raise ParseError(f'Tweet {tweet_id} has empty text')

        self._id: str = tweet_id
        self._text: str = text
        self._lang: str = lang
        self._timestamp: int = timestamp
        self._urls: List[str] = list(urls) if urls is not None else []

    @property
    def id(self) -> str:
        """
        The tweet id. Read-only.
        """
        return self._id

    @property
    def text(self) -> str:
        """
        The raw text of the tweet. Read-only.
        """
        return self._text

    @property
    def lang(self) -> str:
        """
        The language code of the tweet. Read-only.
        """
        return self._lang

    @property
    def timestamp(self) -> int:
        """
        The UTC epoch seconds at which the tweet was posted. Read-only.
        """
        return self._timestamp

    @property
    def urls(self) -> List[str]:
        """
        A copy of the explicit URL list of the tweet.
        """
        return list(self._urls)

    @classmethod
    def from_json(cls, obj: Mapping[str, Any]) -> 'TweetRecord':
        """
        Create a TweetRecord from its parsed JSON-lines object.

        Args:
            obj: The parsed object, with keys id, text, lang, timestamp and
                optionally urls.

        Returns:
            The equivalent TweetRecord.

        Raises:
            ParseError: If a field is missing or malformed.
        """
        urls = obj.get('urls', [])
        if not isinstance(urls, list) or not all(
                isinstance(u, str) for u in urls):
            raise ParseError(f'Field "urls" must be a list of strings, got {urls!r}')

        return cls(_require(obj, 'id', str), _require(obj, 'text', str),
                   _require(obj, 'lang', str), _require(obj, 'timestamp', int),
                   urls)

    def to_json(self) -> Dict[str, Any]:
        """
        Provides the JSON-lines object of this tweet.

        Returns:
            The dict with keys id, text, lang, timestamp and urls.
        """
        return {
            'id': self._id,
            'text': self._text,
            'lang': self._lang,
            'timestamp': self._timestamp,
            'urls': list(self._urls)
        }

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TweetRecord):
            return NotImplemented
        return self.to_json() == other.to_json()

    def __repr__(self) -> str:
        return f'TweetRecord({self._id!r}, {self._text!r})'
