"""
Defines the LabeledExample type, the unit of training and testing. A labeled
example is a post's text paired with a class label, together with the optional
provenance of the label (the linked video and its title) and a timestamp.
"""

from typing import Any, Dict, Mapping, Optional

from pysilver.exception import ParseError
from pysilver.serializable import Serializable
from pysilver.unit.tweet import _require


def _optional(obj: Mapping[str, Any], key: str, kind: type) -> Any:
    """
    Fetch an optional key from a parsed JSON object and check its type.

    Args:
        obj: The parsed JSON object.
        key: The key that may be present.
        kind: The expected python type of the value when present.

    Returns:
        The value, or None if the key is absent or null.

    Raises:
        ParseError: If the value is present with the wrong type.
    """
    value = obj.get(key)
    if value is None:
        return None

    return _require(obj, key, kind)


class LabeledExample(Serializable):
    """
    A labeled example. Examples are immutable; relabeling, for example onto a
    coarser class scheme, creates a new example.
    """

    __slots__ = ['_text', '_label', '_video_id', '_title', '_timestamp']

    def __init__(self,
                 text: str,
                 label: str,
                 video_id: Optional[str] = None,
                 title: Optional[str] = None,
                 timestamp: Optional[int] = None) -> None:
        """
        Create a LabeledExample.

        Args:
            text: The raw text of the example.
            label: The class label.
            video_id: The id of the video the label was transferred from.
            title: The title of that video.
            timestamp: UTC epoch seconds of the underlying post.

        Raises:
            ParseError: If the text or the label is empty.
        """
        if not text:
            raise ParseError('Example text cannot be empty')
        if not label:
            raise ParseError('Example label cannot be empty')

        self._text: str = text
        self._label: str = label
        self._video_id: Optional[str] = video_id
        self._title: Optional[str] = title
        self._timestamp: Optional[int] = timestamp

    @property
    def text(self) -> str:
        """
        The raw text. Read-only.
        """
        return self._text

    @property
    def label(self) -> str:
        """
        The class label. Read-only.
        """
        return self._label

    @property
    def video_id(self) -> Optional[str]:
        """
        The id of the linked video, if the label came from one.
        """
        return self._video_id

    @property
    def title(self) -> Optional[str]:
        """
        The title of the linked video, if known.
        """
        return self._title

    @property
    def timestamp(self) -> Optional[int]:
        """
        UTC epoch seconds of the underlying post, if known.
        """
        return self._timestamp

    def relabel(self, label: str) -> 'LabeledExample':
        """
        Create a copy of this example with a different label.

        Args:
            label: The new label.

        Returns:
            The relabeled example. All other fields are shared.
        """
        return LabeledExample(self._text, label, self._video_id, self._title,
                              self._timestamp)

    @classmethod
    def from_json(cls, obj: Mapping[str, Any]) -> 'LabeledExample':
        """
        Create a LabeledExample from its parsed JSON-lines object.

        Args:
            obj: The parsed object with keys text and label, and optionally
                video_id, title, and timestamp.

        Returns:
            The equivalent LabeledExample.

        Raises:
            ParseError: If a field is missing or malformed.
        """
        return cls(_require(obj, 'text', str), _require(obj, 'label', str),
                   _optional(obj, 'video_id', str),
                   _optional(obj, 'title', str),
                   _optional(obj, 'timestamp', int))

    def to_json(self) -> Dict[str, Any]:
        """
        Provides the JSON-lines object of this example. Absent optional fields
        are omitted rather than written as null.

        Returns:
            The dict representation of the example.
        """
        obj: Dict[str, Any] = {'text': self._text, 'label': self._label}
        if self._video_id is not None:
            obj['video_id'] = self._video_id
        if self._title is not None:
            obj['title'] = self._title
        if self._timestamp is not None:
            obj['timestamp'] = self._timestamp

        return obj

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, LabeledExample):
            return NotImplemented
        return self.to_json() == other.to_json()

    def __hash__(self) -> int:
        return hash((self._text, self._label, self._video_id, self._title,
                     self._timestamp))

    def __repr__(self) -> str:
        return f'LabeledExample({self._text!r}, {self._label!r})'
