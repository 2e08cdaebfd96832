"""
Harvesting a silver corpus: extracting video ids from posts, transferring video
categories to the posts that link them, filtering retweets and duplicates, and
drawing balanced, reproducible samples and splits.

Every operation is a stream transform over immutable records. Statistics are
collected in objects whose merge is associative, so a large input can be sharded,
processed in parts, and the counts added up.
"""

import logging
import re
import zlib
from collections import Counter, OrderedDict
from typing import (Any, Dict, Iterable, Iterator, List, Mapping, Optional,
                    Sequence, Tuple)
from urllib.parse import parse_qs, urlsplit

import numpy as np

from pysilver.exception import CorpusError, SchemeError
from pysilver.textproc import dedup_key, normalize
from pysilver.unit.example import LabeledExample
from pysilver.unit.scheme import ClassScheme
from pysilver.unit.tweet import TweetRecord
from pysilver.unit.video import VideoMeta

logger = logging.getLogger(__name__)

_LINK_CANDIDATE = re.compile(
    r'(?<![\w.-])(?:https?://)?(?:[\w-]+\.)*(?:youtube\.com|youtu\.be)/\S+', re.IGNORECASE)
_ID_PREFIX = re.compile(r'([A-Za-z0-9_-]{11})(?![A-Za-z0-9_-])')
_RETWEET = re.compile(r'rt @', re.IGNORECASE)


def _leading_id(segment: str) -> Optional[str]:
    """
    Read a video id off the start of a path segment or parameter value. The id
    must be followed by the end of the string or by a character outside the id
    alphabet, so trailing punctuation is tolerated but a 12 character token is
    not truncated into an id.
    """
    m = _ID_PREFIX.match(segment)
    return m.group(1) if m else None


def _video_id_from_link(link: str) -> Optional[str]:
    """
    Extract the video id from one YouTube link.

    Args:
        link: A link, with or without scheme.

    Returns:
        The video id, or None if the link is not a recognized video link.
    """
    if '://' not in link:
        link = 'http://' + link

    try:
        parts = urlsplit(link)
        host = (parts.hostname or '').lower()
    except ValueError:
        return None

    path = parts.path
    if host == 'youtu.be' or host.endswith('.youtu.be'):
        return _leading_id(path.lstrip('/'))

    if host == 'youtube.com' or host.endswith('.youtube.com'):
        if path.rstrip('/') == '/watch':
            for value in parse_qs(parts.query).get('v', []):
                video_id = _leading_id(value)
                if video_id:
                    return video_id
            return None

        for prefix in ('/v/', '/embed/'):
            if path.startswith(prefix):
                return _leading_id(path[len(prefix):])

    return None


def extract_video_ids(text: str, urls: Sequence[str] = ()) -> List[str]:
    """
    Find the ids of the videos a post links. Recognized links are watch pages
    (with the v parameter anywhere in the query, any subdomain, http or https),
    youtu.be short links, and /v/ and /embed/ paths. The urls list is scanned
    before the inline text. Malformed links are skipped.

    Args:
        text: The post text, which may contain inline links.
        urls: The explicit URLs of the post.

    Returns:
        The distinct video ids in order of first occurrence.
    """
    ids: List[str] = []
    seen = set()

    candidates: List[str] = []
    for url in urls:
        candidates.extend(m.group(0) for m in _LINK_CANDIDATE.finditer(url))
    candidates.extend(m.group(0) for m in _LINK_CANDIDATE.finditer(text))

    for candidate in candidates:
        video_id = _video_id_from_link(candidate)
        if video_id and video_id not in seen:
            seen.add(video_id)
            ids.append(video_id)

    return ids


class TransferStats:
    """
    Counters of a label transfer. A tweet is resolved when one of its video ids
    is in the video map. A resolved tweet whose category is dropped, unknown, or
    whose text normalizes to nothing emits no example. per_class counts the
    emitted examples, so it sums to emitted.
    """
    def __init__(self) -> None:
        self.tweets: int = 0
        self.resolved: int = 0
        self.unresolved: int = 0
        self.dropped_class: int = 0
        self.unknown_category: int = 0
        self.empty_text: int = 0
        self.per_class: Counter = Counter()

    @property
    def emitted(self) -> int:
        return sum(self.per_class.values())

    def merge(self, other: 'TransferStats') -> 'TransferStats':
        """
        Combine the counts of two shards.

        Args:
            other: The counts of another shard.

        Returns:
            New stats holding the sums.
        """
        merged = TransferStats()
        for key in ('tweets', 'resolved', 'unresolved', 'dropped_class',
                    'unknown_category', 'empty_text'):
            setattr(merged, key, getattr(self, key) + getattr(other, key))
        merged.per_class = self.per_class + other.per_class

        return merged

    def to_json(self) -> Dict[str, Any]:
        return {
            'tweets': self.tweets,
            'resolved': self.resolved,
            'unresolved': self.unresolved,
            'dropped_class': self.dropped_class,
            'unknown_category': self.unknown_category,
            'empty_text': self.empty_text,
            'emitted': self.emitted,
            'per_class': dict(sorted(self.per_class.items()))
        }


def transfer_labels(tweets: Iterable[TweetRecord],
                    videos: Mapping[str, VideoMeta],
                    scheme: ClassScheme,
                    stats: Optional[TransferStats] = None
                    ) -> Iterator[LabeledExample]:
    """
    Label tweets with the merged category of the video they link. The first
    extractable video id that is in the video map decides the label.

    Args:
        tweets: The tweets.
        videos: Video id to metadata.
        scheme: The scheme used to merge raw categories.
        stats: Optional counters, updated as the iteration proceeds.

    Yields:
        One example per tweet that resolves to a kept class, in tweet order.
    """
    if stats is None:
        stats = TransferStats()

    for tweet in tweets:
        stats.tweets += 1

        video = None
        for video_id in extract_video_ids(tweet.text, tweet.urls):
            video = videos.get(video_id)
            if video is not None:
                break

        if video is None:
            stats.unresolved += 1
            continue

        stats.resolved += 1
        try:
            label = scheme.merge(video.category)
        except SchemeError:
            stats.unknown_category += 1
            logger.warning('Video %s has unknown category "%s"; skipping tweet %s.',
                           video.video_id, video.category, tweet.id)
            continue

        if label is None:
            stats.dropped_class += 1
            continue

        if not normalize(tweet.text):
            stats.empty_text += 1
            continue

        stats.per_class[label] += 1
        yield LabeledExample(tweet.text, label, video.video_id, video.title,
                             tweet.timestamp)


class DedupStats:
    """
    Counters of a dedupe pass.
    """
    def __init__(self) -> None:
        self.seen: int = 0
        self.retweets: int = 0
        self.duplicates: int = 0
        self.kept: int = 0

    def merge(self, other: 'DedupStats') -> 'DedupStats':
        """
        Add up the counters of two passes. Duplicates across the two passes are
        not visible here; merge the shard outputs through dedupe again for that.
        """
        merged = DedupStats()
        for key in ('seen', 'retweets', 'duplicates', 'kept'):
            setattr(merged, key, getattr(self, key) + getattr(other, key))

        return merged

    def to_json(self) -> Dict[str, Any]:
        return {
            'seen': self.seen,
            'retweets': self.retweets,
            'duplicates': self.duplicates,
            'kept': self.kept
        }


def is_retweet(text: str) -> bool:
    """
    Check whether a post is a retweet, i.e. starts with "RT @" after leading
    whitespace, in any case.

    Args:
        text: The raw text.

    Returns:
        True for retweets.
    """
    return _RETWEET.match(text.lstrip()) is not None


def dedupe(examples: Iterable[LabeledExample],
           stats: Optional[DedupStats] = None) -> Iterator[LabeledExample]:
    """
    Drop retweets, then keep only the first example of every dedup key.

    Args:
        examples: The examples.
        stats: Optional counters, updated as the iteration proceeds.

    Yields:
        The surviving examples, in input order.
    """
    if stats is None:
        stats = DedupStats()

    keys = set()
    for example in examples:
        stats.seen += 1
        if is_retweet(example.text):
            stats.retweets += 1
            continue

        key = dedup_key(example.text)
        if key in keys:
            stats.duplicates += 1
            continue

        keys.add(key)
        stats.kept += 1
        yield example


def group_by_class(
        examples: Iterable[LabeledExample]
) -> 'OrderedDict[str, List[LabeledExample]]':
    """
    Group examples by label, keeping input order within every class.

    Args:
        examples: The examples.

    Returns:
        Ordered mapping from class, in order of first occurrence, to examples.
    """
    groups: 'OrderedDict[str, List[LabeledExample]]' = OrderedDict()
    for example in examples:
        groups.setdefault(example.label, []).append(example)

    return groups


def class_rng(seed: int, label: str) -> np.random.Generator:
    """
    The random generator used for one class. Deriving it from both the seed
    and the class name keeps every class's draw independent of which other
    classes are present and of their order.

    Args:
        seed: The experiment seed.
        label: The class name.

    Returns:
        A seeded numpy Generator.
    """
    return np.random.default_rng([seed & 0xFFFFFFFF, zlib.crc32(label.encode('utf-8'))])


def balance_sample(examples: Mapping[str, Sequence[LabeledExample]],
                   cap: int,
                   seed: int,
                   caps: Optional[Mapping[str, int]] = None
                   ) -> 'OrderedDict[str, List[LabeledExample]]':
    """
    Sample at most cap examples from every class, uniformly without
    replacement. Sampled examples keep their input order.

    Args:
        examples: Class to its examples.
        cap: The per class maximum.
        seed: The seed of the draw.
        caps: Optional per class overrides of cap, to build deliberately
            imbalanced corpora.

    Returns:
        Class to its sample, classes in input order.

    Raises:
        ValueError: If a cap is less than 1.
    """
    if cap < 1:
        raise ValueError(f'cap must be at least 1, got {cap}')

    caps = dict(caps or {})
    sample: 'OrderedDict[str, List[LabeledExample]]' = OrderedDict()
    for label, group in examples.items():
        class_cap = caps.get(label, cap)
        if class_cap < 1:
            raise ValueError(f'cap for {label} must be at least 1, got {class_cap}')

        if not group:
            logger.warning('Class %s has no examples to sample.', label)
            sample[label] = []
            continue

        k = min(class_cap, len(group))
        picked = class_rng(seed, label).choice(len(group), size=k, replace=False)
        sample[label] = [group[i] for i in sorted(picked.tolist())]

    return sample


def split_holdout(examples: Sequence[LabeledExample], per_class_test: int,
                  seed: int) -> Tuple[List[LabeledExample], List[LabeledExample]]:
    """
    Hold out exactly per_class_test examples of every class for testing. Both
    parts keep input order.

    Args:
        examples: The examples.
        per_class_test: The number of test examples per class.
        seed: The seed of the draw.

    Returns:
        The pair (train, test). They partition the input.

    Raises:
        ValueError: If per_class_test is less than 1.
        CorpusError: If a class does not have more than per_class_test
            examples.
    """
    if per_class_test < 1:
        raise ValueError(f'per_class_test must be at least 1, got {per_class_test}')

    test_positions = set()
    groups: Dict[str, List[int]] = OrderedDict()
    for i, example in enumerate(examples):
        groups.setdefault(example.label, []).append(i)

    for label, positions in groups.items():
        if len(positions) <= per_class_test:
            raise CorpusError(
                f'Class {label} has {len(positions)} examples, needs more than {per_class_test}'
            )
        order = class_rng(seed, label).permutation(len(positions))
        test_positions.update(positions[j] for j in order[:per_class_test].tolist())

    train = [e for i, e in enumerate(examples) if i not in test_positions]
    test = [e for i, e in enumerate(examples) if i in test_positions]

    return train, test


def coarsen(example: LabeledExample, scheme: ClassScheme) -> LabeledExample:
    """
    Relabel an example with its coarse class.

    Args:
        example: The example, labeled with a class of the scheme.
        scheme: The scheme holding the coarse map.

    Returns:
        The relabeled example.

    Raises:
        SchemeError: If the example's label is not in the scheme.
    """
    return example.relabel(scheme.coarse(example.label))
