"""
Defines the VideoMeta type, the metadata of a linked video whose category is
transferred to the tweets linking it.
"""

import re
from typing import Any, ClassVar, Dict, Mapping

from pysilver.exception import ParseError
from pysilver.serializable import Serializable
from pysilver.unit.tweet import _require


class VideoMeta(Serializable):
    """
    The metadata of a video. The id is exactly 11 characters from the alphabet
    [A-Za-z0-9_-]. The category is the raw category name as reported by the
    video platform, before any class merging.
    """

    __slots__ = ['_video_id', '_title', '_category']

    VIDEO_ID_PATTERN: ClassVar[str] = r'[A-Za-z0-9_-]{11}'

    def __init__(self, video_id: str, title: str, category: str) -> None:
        """
        Create a VideoMeta.

        Args:
            video_id: The 11 character video id.
            title: The video title. May be empty.
            category: The raw category name.

        Raises:
            ParseError: If the video id is not a valid id.
        """
        if not VideoMeta.is_video_id(video_id):
            raise ParseError(f'"{video_id}" is not a valid video id')

        self._video_id: str = video_id
        self._title: str = title
        self._category: str = category

    @staticmethod
    def is_video_id(candidate: str) -> bool:
        """
        Check if a string is a well formed video id.

        Args:
            candidate: The string to check.

        Returns:
            True if the string is exactly 11 characters from the id alphabet.
        """
        return re.fullmatch(VideoMeta.VIDEO_ID_PATTERN, candidate) is not None

    @property
    def video_id(self) -> str:
        """
        The video id. Read-only.
        """
        return self._video_id

    @property
    def title(self) -> str:
        """
        The video title. Read-only.
        """
        return self._title

    @property
    def category(self) -> str:
        """
        The raw category name. Read-only.
        """
        return self._category

    @classmethod
    def from_json(cls, obj: Mapping[str, Any]) -> 'VideoMeta':
        """
        Create a VideoMeta from its parsed JSON-lines object.

        Args:
            obj: The parsed object with keys video_id, title and category.

        Returns:
            The equivalent VideoMeta.

        Raises:
            ParseError: If a field is missing or malformed.
        """
        title = obj.get('title', '')
        if not isinstance(title, str):
            raise ParseError(f'Field "title" must be a string, got {title!r}')

        return cls(_require(obj, 'video_id', str), title,
                   _require(obj, 'category', str))

    def to_json(self) -> Dict[str, Any]:
        return {
            'video_id': self._video_id,
            'title': self._title,
            'category': self._category
        }

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, VideoMeta):
            return NotImplemented
        return self.to_json() == other.to_json()

    def __repr__(self) -> str:
        return f'VideoMeta({self._video_id!r}, {self._category!r})'
