"""
Loaders for the JSON-lines files of a distant supervision pipeline: tweets,
video metadata, and labeled corpora. Every format can be loaded into memory or
iterated without storing records, so harvesting is bounded by the video map and
not by the size of the tweet stream. This module is the main entrance to
pysilver's file handling.
"""

import csv
import json
import logging
import os
from typing import Any, Collection, Dict, Iterable, Iterator, Mapping, Optional, Union

from pysilver._parser import ReadStats, iter_records
from pysilver.exception import ParseError, SchemeError
from pysilver.unit.dataset import Dataset
from pysilver.unit.example import LabeledExample
from pysilver.unit.tweet import TweetRecord
from pysilver.unit.video import VideoMeta

logger = logging.getLogger(__name__)

PathLike = Union[str, bytes, os.PathLike]


def iter_tweets_from_file(file_descriptor: PathLike,
                          lenient: bool = False,
                          stats: Optional[ReadStats] = None
                          ) -> Iterator[TweetRecord]:
    """
    Iterate over a tweets file.

    Args:
        file_descriptor: The file to iterate. Each line is an object with keys
            id, text, lang, timestamp and optionally urls.
        lenient: If True, malformed lines are counted and skipped.
        stats: Optional counters updated during iteration.

    Yields:
        The tweets in file order.

    Raises:
        IOError: If there is an error opening the file.
        ParseError: If a line is malformed and lenient is False.
    """
    with open(file_descriptor, encoding='utf-8') as f:
        yield from iter_records(f, TweetRecord.from_json, lenient, stats)


def iter_tweets_from_resource(resource: Iterable[str],
                              lenient: bool = False,
                              stats: Optional[ReadStats] = None
                              ) -> Iterator[TweetRecord]:
    """
    Iterate over the tweets from an iterable string resource.

    This is a generic method that allows for any general resource that can
    provide lines (like a streaming fetcher or a decompressing reader) to be
    parsed as a tweets source.

    Args:
        resource: The line source.
        lenient: If True, malformed lines are counted and skipped.
        stats: Optional counters updated during iteration.

    Yields:
        The tweets in source order.

    Raises:
        ParseError: If a line is malformed and lenient is False.
    """
    yield from iter_records(resource, TweetRecord.from_json, lenient, stats)


def iter_videos_from_file(file_descriptor: PathLike,
                          lenient: bool = False,
                          stats: Optional[ReadStats] = None
                          ) -> Iterator[VideoMeta]:
    """
    Iterate over a video metadata file.

    Args:
        file_descriptor: The file to iterate. Each line is an object with keys
            video_id, title, and category.
        lenient: If True, malformed lines are counted and skipped.
        stats: Optional counters updated during iteration.

    Yields:
        The video metadata records in file order.

    Raises:
        IOError: If there is an error opening the file.
        ParseError: If a line is malformed and lenient is False.
    """
    with open(file_descriptor, encoding='utf-8') as f:
        yield from iter_records(f, VideoMeta.from_json, lenient, stats)


def load_video_map(file_descriptor: PathLike,
                   lenient: bool = False,
                   stats: Optional[ReadStats] = None) -> Dict[str, VideoMeta]:
    """
    Load a video metadata file into a map keyed by video id. If an id repeats,
    the last record wins.

    Args:
        file_descriptor: The video metadata file.
        lenient: If True, malformed lines are counted and skipped.
        stats: Optional counters updated during loading.

    Returns:
        A dict from video id to VideoMeta.

    Raises:
        IOError: If there is an error opening the file.
        ParseError: If a line is malformed and lenient is False.
    """
    videos: Dict[str, VideoMeta] = {}
    duplicates = 0
    for video in iter_videos_from_file(file_descriptor, lenient, stats):
        if video.video_id in videos:
            duplicates += 1
        videos[video.video_id] = video

    if duplicates:
        logger.info('%d video ids were repeated in %s; the last record won.',
                    duplicates, file_descriptor)

    return videos


def _example_factory(classes: Optional[Collection[str]]):
    if classes is None:
        return LabeledExample.from_json

    def create(obj: Mapping[str, Any]) -> LabeledExample:
        example = LabeledExample.from_json(obj)
        if example.label not in classes:
            raise SchemeError(f'Label {example.label!r} is not a class of the scheme')
        return example

    return create


def iter_examples_from_file(file_descriptor: PathLike,
                            lenient: bool = False,
                            stats: Optional[ReadStats] = None,
                            classes: Optional[Collection[str]] = None
                            ) -> Iterator[LabeledExample]:
    """
    Iterate over a labeled corpus file.

    Args:
        file_descriptor: The file to iterate. Each line is an object with keys
            text and label, and optionally video_id, title and timestamp.
        lenient: If True, malformed lines are counted and skipped.
        stats: Optional counters updated during iteration.
        classes: If given, the labels allowed in the file.

    Yields:
        The examples in file order.

    Raises:
        IOError: If there is an error opening the file.
        ParseError: If a line is malformed and lenient is False.
        SchemeError: If a label is not one of classes, naming the line. This
            is raised even when lenient is True.
    """
    with open(file_descriptor, encoding='utf-8') as f:
        yield from iter_records(f, _example_factory(classes), lenient, stats)


def iter_examples_from_string(source: str) -> Iterator[LabeledExample]:
    """
    Iterate over a labeled corpus held in a string.

    Args:
        source: The JSON-lines string.

    Yields:
        The examples in source order.

    Raises:
        ParseError: If a line is malformed.
    """
    yield from iter_records(source.splitlines(), LabeledExample.from_json)


def load_examples_from_file(file_descriptor: PathLike,
                            classes: Optional[Collection[str]] = None) -> Dataset:
    """
    Load a labeled corpus file into a Dataset.

    Args:
        file_descriptor: The labeled corpus file.
        classes: If given, the labels allowed in the file.

    Returns:
        A Dataset of the file's examples, in file order.

    Raises:
        IOError: If there is an error opening the file.
        ParseError: If a line is malformed.
        SchemeError: If a label is not one of classes, naming the line.
    """
    return Dataset(iter_examples_from_file(file_descriptor, classes=classes))


def load_examples_from_string(source: str) -> Dataset:
    """
    Load a labeled corpus held in a string into a Dataset.

    Args:
        source: The JSON-lines string.

    Returns:
        A Dataset of the examples, in source order.

    Raises:
        ParseError: If a line is malformed.
    """
    return Dataset(iter_examples_from_string(source))


def iter_examples_from_tsv(file_descriptor: PathLike,
                           classes: Optional[Collection[str]] = None
                           ) -> Iterator[LabeledExample]:
    """
    Iterate over a simple gold file of text<TAB>label lines. A first line of
    exactly "text<TAB>label" is treated as a header and skipped.

    Args:
        file_descriptor: The TSV file.
        classes: If given, the labels allowed in the file.

    Yields:
        The examples in file order.

    Raises:
        IOError: If there is an error opening the file.
        ParseError: If a line does not have two columns.
        SchemeError: If a label is not one of classes, naming the line.
    """
    with open(file_descriptor, encoding='utf-8', newline='') as f:
        reader = csv.reader(f, delimiter='\t', quoting=csv.QUOTE_NONE)
        for i, row in enumerate(reader):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if i == 0 and [c.strip().lower() for c in row] == ['text', 'label']:
                continue
            if len(row) != 2:
                raise ParseError(
                    f'Line {i + 1} must have 2 tab separated columns, has {len(row)}'
                )

            try:
                example = LabeledExample(row[0].strip(), row[1].strip())
            except ParseError as err:
                raise ParseError(
                    f'Failed to create record at line {i + 1}') from err

            if classes is not None and example.label not in classes:
                raise SchemeError(
                    f'Line {i + 1}: Label {example.label!r} is not a class of the scheme'
                )
            yield example


def write_records(records: Iterable[Any], writable: Any) -> int:
    """
    Write serializable records as JSON-lines to something that is writable.

    Args:
        records: The records. Each must have a to_json method.
        writable: The writable object such as a file.

    Returns:
        The number of records written.
    """
    n = 0
    for record in records:
        writable.write(json.dumps(record.to_json(), ensure_ascii=False))
        writable.write('\n')
        n += 1

    return n
