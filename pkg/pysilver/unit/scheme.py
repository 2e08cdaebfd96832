"""
Defines the ClassScheme type, which fixes the identity and order of the classes
a corpus is labeled with. A scheme maps the raw video categories onto the
canonical classes (merging some, dropping others) and the canonical classes
onto a coarse set of classes.
"""

import json
import os
from pathlib import Path
from typing import Any, ClassVar, Dict, List, Mapping, Optional, Sequence, Union

from pysilver.exception import ParseError, SchemeError
from pysilver.serializable import Serializable

PathLike = Union[str, bytes, os.PathLike]


def _category_key(name: str) -> str:
    """
    Create the lookup key for a raw category name. Lookups ignore case and
    whitespace, so that "Autos & Vehicles" and "Autos&Vehicles" are the same.

    Args:
        name: The raw category name.

    Returns:
        The lookup key.
    """
    return ''.join(name.split()).casefold()


class ClassScheme(Serializable):
    """
    A class scheme. The merge map sends every raw category either to a class in
    the class list or to None, which marks the category as dropped. The class
    list order is the order used for model heads, confusion matrix rows, and
    reports. The coarse map sends every class to a coarse class; coarse classes
    are ordered alphabetically.
    """

    __slots__ = ['_raw_categories', '_merge_map', '_class_list', '_coarse_map',
                 '_lookup']

    DEFAULT_LOCATION: ClassVar[Path] = Path(
        __file__).parent.parent / 'data' / 'scheme.json'

    def __init__(self, raw_categories: Sequence[str],
                 merge_map: Mapping[str, Optional[str]],
                 class_list: Sequence[str], coarse_map: Mapping[str,
                                                                str]) -> None:
        """
        Create a ClassScheme and validate it.

        Args:
            raw_categories: The recognized raw category names.
            merge_map: Raw category name to class, or None to drop.
            class_list: The ordered classes.
            coarse_map: Class to coarse class.

        Raises:
            SchemeError: If the pieces are inconsistent with one another.
        """
        if len(set(class_list)) != len(class_list):
            raise SchemeError('The class list contains duplicates')
        if set(merge_map) != set(raw_categories):
            raise SchemeError(
                'The merge map must define exactly the raw categories')
        if set(coarse_map) != set(class_list):
            raise SchemeError('The coarse map must define exactly the classes')

        for raw, target in merge_map.items():
            if target is not None and target not in class_list:
                raise SchemeError(
                    f'Raw category {raw} maps to unknown class {target}')

        self._raw_categories: List[str] = list(raw_categories)
        self._merge_map: Dict[str, Optional[str]] = dict(merge_map)
        self._class_list: List[str] = list(class_list)
        self._coarse_map: Dict[str, str] = dict(coarse_map)
        self._lookup: Dict[str, str] = {
            _category_key(raw): raw
            for raw in raw_categories
        }

    @classmethod
    def default(cls) -> 'ClassScheme':
        """
        Load the scheme shipped with the package: 18 raw categories merged into
        14 classes, which group into 4 coarse classes.

        Returns:
            The default ClassScheme.
        """
        return cls.load(cls.DEFAULT_LOCATION)

    @classmethod
    def load(cls, path: PathLike) -> 'ClassScheme':
        """
        Load a scheme from a JSON file.

        Args:
            path: The location of the JSON scheme file.

        Returns:
            The loaded ClassScheme.

        Raises:
            IOError: If the file cannot be opened.
            ParseError: If the file is not a valid scheme file.
            SchemeError: If the scheme is inconsistent.
        """
        with open(path, encoding='utf-8') as f:
            try:
                obj = json.load(f)
            except json.JSONDecodeError as err:
                raise ParseError(f'Scheme file {path!r} is not valid JSON') from err

        return cls.from_json(obj)

    @classmethod
    def from_json(cls, obj: Mapping[str, Any]) -> 'ClassScheme':
        """
        Create a ClassScheme from its JSON object.

        Args:
            obj: The JSON object with keys raw_categories, merge_map,
                class_list, and coarse_map. If raw_categories is omitted, the
                keys of merge_map are used.

        Returns:
            The equivalent ClassScheme.

        Raises:
            ParseError: If a required key is missing.
            SchemeError: If the scheme is inconsistent.
        """
        try:
            merge_map = obj['merge_map']
            class_list = obj['class_list']
            coarse_map = obj['coarse_map']
        except KeyError as err:
            raise ParseError(f'Scheme is missing the key {err}') from err

        raw_categories = obj.get('raw_categories', list(merge_map))
        return cls(raw_categories, merge_map, class_list, coarse_map)

    def to_json(self) -> Dict[str, Any]:
        return {
            'raw_categories': list(self._raw_categories),
            'merge_map': dict(self._merge_map),
            'class_list': list(self._class_list),
            'coarse_map': dict(self._coarse_map)
        }

    @property
    def raw_categories(self) -> List[str]:
        """
        A copy of the recognized raw category names.
        """
        return list(self._raw_categories)

    @property
    def class_list(self) -> List[str]:
        """
        A copy of the ordered classes.
        """
        return list(self._class_list)

    @property
    def coarse_list(self) -> List[str]:
        """
        The coarse classes, ordered alphabetically.
        """
        return sorted(set(self._coarse_map.values()))

    def is_known(self, raw: str) -> bool:
        """
        Check if a raw category name is recognized by the scheme.

        Args:
            raw: The raw category name. Case and whitespace are ignored.

        Returns:
            True if the category is recognized.
        """
        return _category_key(raw) in self._lookup

    def merge(self, raw: str) -> Optional[str]:
        """
        Map a raw category name onto its class.

        Args:
            raw: The raw category name. Case and whitespace are ignored.

        Returns:
            The class, or None if the category is dropped.

        Raises:
            SchemeError: If the raw category is not recognized.
        """
        try:
            canonical = self._lookup[_category_key(raw)]
        except KeyError as err:
            raise SchemeError(f'Unknown raw category "{raw}"') from err

        return self._merge_map[canonical]

    def coarse(self, label: str) -> str:
        """
        Map a class onto its coarse class.

        Args:
            label: The class.

        Returns:
            The coarse class.

        Raises:
            SchemeError: If the class is not in the scheme.
        """
        try:
            return self._coarse_map[label]
        except KeyError as err:
            raise SchemeError(f'Unknown class "{label}"') from err

    def index(self, label: str) -> int:
        """
        The position of a class in the class list.

        Args:
            label: The class.

        Returns:
            The 0-based position of the class.

        Raises:
            SchemeError: If the class is not in the scheme.
        """
        try:
            return self._class_list.index(label)
        except ValueError as err:
            raise SchemeError(f'Unknown class "{label}"') from err

    def coarse_scheme(self) -> 'ClassScheme':
        """
        Create the scheme whose classes are this scheme's coarse classes. Raw
        categories map straight onto coarse classes, and the coarse map of the
        new scheme is the identity.

        Returns:
            The coarse ClassScheme.
        """
        merge_map = {
            raw: None if target is None else self._coarse_map[target]
            for raw, target in self._merge_map.items()
        }
        coarse_list = self.coarse_list

        return ClassScheme(self._raw_categories, merge_map, coarse_list,
                           {c: c for c in coarse_list})

    def __contains__(self, label: object) -> bool:
        return label in self._class_list

    def __len__(self) -> int:
        return len(self._class_list)
