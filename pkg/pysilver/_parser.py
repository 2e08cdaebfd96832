"""
An internal module for common parsing logic, which is currently creating
records from an iterator that returns JSON-lines source lines. This logic can
then be used in the Dataset class or in pysilver.load.
"""

import json
import logging
from typing import Any, Callable, Dict, Iterable, Iterator, Mapping, Optional, TypeVar

from pysilver.exception import ParseError, SchemeError

logger = logging.getLogger(__name__)

T = TypeVar('T')


class ReadStats:
    """
    Counters for one pass over a JSON-lines source. Blank lines are ignored and
    are not counted as records.
    """
    def __init__(self) -> None:
        self.records: int = 0
        self.malformed: int = 0
        self.malformed_lines: list = []

    def to_json(self) -> Dict[str, Any]:
        return {
            'records': self.records,
            'malformed': self.malformed,
            'malformed_lines': list(self.malformed_lines)
        }


def _create_record(line: str, line_num: int,
                   factory: Callable[[Mapping[str, Any]], T]) -> T:
    """
    Creates a record from one source line.

    Args:
        line: The stripped JSON source line.
        line_num: The 1-based line number, for error reporting.
        factory: Creates the record from the parsed JSON object.

    Returns:
        The created record.

    Raises:
        ParseError: If the line is not a JSON object or the record is invalid.
        SchemeError: If the record names a class outside the scheme.
    """
    try:
        obj = json.loads(line)
    except json.JSONDecodeError as err:
        raise ParseError(f'Line {line_num} is not valid JSON') from err

    if not isinstance(obj, dict):
        raise ParseError(f'Line {line_num} is not a JSON object')

    try:
        return factory(obj)
    except ParseError as err:
        raise ParseError(f'Failed to create record at line {line_num}') from err
    except SchemeError as err:
        raise SchemeError(f'Line {line_num}: {err}') from err


def iter_records(lines_it: Iterable[str],
                 factory: Callable[[Mapping[str, Any]], T],
                 lenient: bool = False,
                 stats: Optional[ReadStats] = None) -> Iterator[T]:
    """
    Iterate over the records constructed from the given lines.

    Args:
        lines_it: An iterator over the lines to parse.
        factory: Creates a record from a parsed JSON object.
        lenient: If True, malformed lines are counted in stats, logged, and
            skipped. Otherwise the first malformed line raises.
        stats: Optional counters, updated as the iteration proceeds.

    Yields:
        The constructed records, in source order.

    Raises:
        ParseError: If a line is malformed and lenient is False.
    """
    if stats is None:
        stats = ReadStats()

    for i, line in enumerate(lines_it):
        line = line.strip()
        if not line:
            continue

        try:
            record = _create_record(line, i + 1, factory)
        except ParseError as err:
            if not lenient:
                raise
            stats.malformed += 1
            stats.malformed_lines.append(i + 1)
            logger.warning('Skipping malformed line %d: %s', i + 1,
                           err.__cause__ or err)
            continue

        stats.records += 1
        yield record
