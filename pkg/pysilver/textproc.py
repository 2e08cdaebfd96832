"""
Normalization and tokenization of short social text, and the two enrichment
variants applied on top of the bag of words: appending the linked video's title,
and duplicating hashtags without their hash character.

No stemming and no stop word removal are applied anywhere.
"""

import enum
import re
import unicodedata
from typing import Any, Dict, List, Mapping, Optional

from pysilver.exception import ParseError

URL_PATTERN = re.compile(
    r'(?:https?://|www\.)\S+|(?:[\w-]+\.)*youtu\.be/\S*', re.IGNORECASE)

_WHITESPACE = re.compile(r'\s+')

SIGILS = ('#', '@')

TokenList = List[str]


class NormalizeOptions:
    """
    The switches of normalize. extra_char_map is a character to character
    substitution table applied before anything else changes the text, which is
    where script specific normalization (such as folding letter variants)
    plugs in. Maps must be idempotent: no value, nor its case folded form, may
    contain a key.
    """

    __slots__ = ['case_fold', 'strip_urls', 'collapse_elongation', 'max_run',
                 'extra_char_map', '_table']

    def __init__(self,
                 case_fold: bool = True,
                 strip_urls: bool = True,
                 collapse_elongation: bool = True,
                 max_run: int = 2,
                 extra_char_map: Optional[Mapping[str, str]] = None) -> None:
        """
        Create the options.

        Args:
            case_fold: Apply Unicode case folding.
            strip_urls: Remove hyperlinks.
            collapse_elongation: Shorten runs of a repeated character.
            max_run: The length runs are shortened to. Runs longer than this are
                collapsed.
            extra_char_map: Optional single character substitutions.

        Raises:
            ValueError: If max_run is less than 1, the map has keys that are
                not single characters, or a mapped value would be mapped again.
        """
        if max_run < 1:
            raise ValueError(f'max_run must be at least 1, got {max_run}')

        char_map = dict(extra_char_map or {})
        if any(len(k) != 1 for k in char_map):
            raise ValueError('extra_char_map keys must be single characters')

        produced = set(char_map.values())
        if case_fold:
            produced |= {v.casefold() for v in char_map.values()}
        chained = sorted(k for k in char_map if any(k in v for v in produced))
        if chained:
            raise ValueError(
                f'extra_char_map values must not produce its keys: {chained}')

        self.case_fold = case_fold
        self.strip_urls = strip_urls
        self.collapse_elongation = collapse_elongation
        self.max_run = max_run
        self.extra_char_map = char_map
        self._table = str.maketrans(char_map) if char_map else None

    @classmethod
    def from_json(cls, obj: Mapping[str, Any]) -> 'NormalizeOptions':
        """
        Create options from the text section of an experiment config.

        Args:
            obj: The JSON object. Missing keys take their defaults.

        Returns:
            The options.

        Raises:
            ParseError: If the object has unknown keys.
        """
        unknown = set(obj) - set(cls.__slots__)
        if unknown:
            raise ParseError(f'Unknown text options: {sorted(unknown)}')

        try:
            return cls(**obj)
        except (TypeError, ValueError) as err:
            raise ParseError(f'Invalid text options: {err}') from err

    def to_json(self) -> Dict[str, Any]:
        return {
            'case_fold': self.case_fold,
            'strip_urls': self.strip_urls,
            'collapse_elongation': self.collapse_elongation,
            'max_run': self.max_run,
            'extra_char_map': dict(self.extra_char_map)
        }

    def translate(self, text: str) -> str:
        """
        Apply the extra character map.
        """
        return text.translate(self._table) if self._table else text

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, NormalizeOptions):
            return NotImplemented
        return self.to_json() == other.to_json()


DEFAULT_OPTIONS = NormalizeOptions()


class Variant(enum.Enum):
    """
    The text pipelines of the silver classifiers: plain bag of words, with the
    video title appended (v), with hashtags duplicated (h), or both (vh).
    """
    BASE = 'base'
    V = 'v'
    H = 'h'
    VH = 'vh'

    @property
    def uses_title(self) -> bool:
        return self in (Variant.V, Variant.VH)

    @property
    def uses_hashtags(self) -> bool:
        return self in (Variant.H, Variant.VH)


def strip_urls(text: str) -> str:
    """
    Replace every hyperlink in the text with a space.

    Args:
        text: The text.

    Returns:
        The text without hyperlinks. Whitespace is not collapsed.
    """
    return URL_PATTERN.sub(' ', text)


def collapse_runs(text: str, max_run: int = 2) -> str:
    """
    Shorten every run of one repeated character to max_run characters.

    Args:
        text: The text.
        max_run: The longest run that is kept as is.

    Returns:
        The text with elongations resolved, e.g. cooooool becomes cool.
    """
    pattern = r'(.)\1{' + str(max_run) + ',}'
    return re.sub(pattern, lambda m: m.group(1) * max_run, text, flags=re.DOTALL)


def _normalize_once(text: str, options: NormalizeOptions) -> str:
    text = unicodedata.normalize('NFC', text)
    text = options.translate(text)
    if options.strip_urls:
        text = strip_urls(text)
    if options.case_fold:
        text = text.casefold()
    if options.collapse_elongation:
        text = collapse_runs(text, options.max_run)

    return _WHITESPACE.sub(' ', text).strip()


def normalize(text: str, options: NormalizeOptions = DEFAULT_OPTIONS) -> str:
    """
    Normalize a post. The steps are, in order: Unicode NFC, the extra character
    map, URL removal, case folding, elongation collapse, and whitespace collapse.
    The steps are repeated until the text is stable, since collapsing a run
    can expose a link (htttps:// becomes https://).

    Args:
        text: The raw text.
        options: Which steps to apply.

    Returns:
        The normalized text. It may be empty.
    """
    current = _normalize_once(text, options)
    while True:
        again = _normalize_once(current, options)
        if again == current:
            return current
        current = again


def _is_punct(ch: str) -> bool:
    return unicodedata.category(ch).startswith('P')


def _strip_punct(s: str) -> str:
    start = 0
    end = len(s)
    while start < end and _is_punct(s[start]):
        start += 1
    while end > start and _is_punct(s[end - 1]):
        end -= 1

    return s[start:end]


def tokenize(normalized: str) -> TokenList:
    """
    Split normalized text into tokens. Leading and trailing punctuation is
    stripped from each token, except that one leading '#' or '@' is kept.
    Interior punctuation such as apostrophes and hyphens is kept. A bare sigil
    is not a token.

    Args:
        normalized: Text that already went through normalize.

    Returns:
        The tokens, in text order.
    """
    tokens = []
    for raw in normalized.split():
        if raw[0] in SIGILS:
            body = _strip_punct(raw[1:])
            token = raw[0] + body if body else ''
        else:
            token = _strip_punct(raw)

        if token:
            tokens.append(token)

    return tokens


def duplicate_hashtags(tokens: TokenList) -> TokenList:
    """
    Append a copy of every hashtag without its hash character.

    Args:
        tokens: The tokens.

    Returns:
        A new list: the tokens followed by the bare hashtag terms, in hashtag
        order.
    """
    extra = [t[1:] for t in tokens if t.startswith('#') and len(t) > 1]
    return list(tokens) + extra


def enrich_with_title(tokens: TokenList,
                      title: Optional[str],
                      options: NormalizeOptions = DEFAULT_OPTIONS) -> TokenList:
    """
    Append the tokens of a video title.

    Args:
        tokens: The tokens of the post.
        title: The title of the linked video. None or empty leaves the tokens
            as they are.
        options: The options the title is normalized with.

    Returns:
        A new list: the post tokens followed by the title tokens.
    """
    if not title:
        return list(tokens)

    return list(tokens) + tokenize(normalize(title, options))


def analyze(text: str,
            variant: Variant = Variant.BASE,
            title: Optional[str] = None,
            options: NormalizeOptions = DEFAULT_OPTIONS,
            training: bool = True) -> TokenList:
    """
    Run the full text pipeline of a variant on one post.

    Title enrichment is a training-side heuristic: titles are only known for
    posts that link a video, so it is skipped when training is False. In the vh
    variant the title is appended first and hashtags are duplicated after, so
    hashtags in titles are duplicated too.

    Args:
        text: The raw text.
        variant: The pipeline variant.
        title: The linked video's title, if any.
        options: The normalization options.
        training: Whether the post is a training example.

    Returns:
        The tokens that make up the post's bag of words.
    """
    tokens = tokenize(normalize(text, options))
    if variant.uses_title and training:
        tokens = enrich_with_title(tokens, title, options)
    if variant.uses_hashtags:
        tokens = duplicate_hashtags(tokens)

    return tokens


def dedup_key(text: str) -> str:
    """
    The duplicate detection key of a post: case folded, without URLs, with
    whitespace collapsed. Posts that differ only by their link share a key.

    Args:
        text: The raw text.

    Returns:
        The key.
    """
    return _WHITESPACE.sub(' ', strip_urls(text).casefold()).strip()
