"""
Defines the Dataset type, an in-memory corpus of labeled examples, and its
JSON-lines output logic.
"""

import json
from collections import OrderedDict
from typing import Any, Dict, Iterable, Iterator, List, MutableSequence, Union, overload

from pysilver.unit.example import LabeledExample


class Dataset(MutableSequence[LabeledExample]):
    """
    The abstraction for a labeled corpus file. A corpus is an ordered
    collection of examples, accessed by numeric index. Order is significant:
    sampling and splitting are deterministic functions of it.
    """
    def __init__(self, it: Iterable[LabeledExample] = ()) -> None:
        """
        Create a Dataset from examples.

        Args:
            it: An iterable of the examples, in corpus order.
        """
        self._examples: List[LabeledExample] = list(it)

    def labels(self) -> List[str]:
        """
        The label of every example, in corpus order.

        Returns:
            The list of labels.
        """
        return [example.label for example in self._examples]

    def by_class(self) -> 'OrderedDict[str, List[LabeledExample]]':
        """
        Group the examples by label. Classes appear in order of first
        occurrence, and examples keep corpus order within their class.

        Returns:
            An ordered mapping from class to its examples.
        """
        groups: 'OrderedDict[str, List[LabeledExample]]' = OrderedDict()
        for example in self._examples:
            groups.setdefault(example.label, []).append(example)

        return groups

    def class_sizes(self) -> Dict[str, int]:
        """
        The number of examples in each class.

        Returns:
            A mapping from class to example count.
        """
        return {label: len(group) for label, group in self.by_class().items()}

    def write(self, writable: Any) -> None:
        """
        Write the Dataset as JSON-lines to something that is writable.

        For file writing, this method is more efficient than building the whole
        serialized string first. Every line, including the last, ends in a
        newline.

        Args:
            writable: The writable object such as a file. Must have a write
                method.
        """
        for example in self._examples:
            writable.write(json.dumps(example.to_json(), ensure_ascii=False))
            writable.write('\n')

    def insert(self, index: int, value: LabeledExample) -> None:
        """
        Insert the given example into the given location.

        This function behaves in the same way as python lists insert.

        Args:
            index: The numeric index to insert the example into.
            value: The example to insert.
        """
        self._examples.insert(index, value)

    def __contains__(self, other: object) -> bool:
        return other in self._examples

    def __iter__(self) -> Iterator[LabeledExample]:
        """
        Allows for iteration over every example in the corpus.

        Yields:
            An iterator over the examples in this Dataset.
        """
        for example in self._examples:
            yield example

    @overload
    def __getitem__(self, key: int) -> LabeledExample:
        pass

    @overload
    def __getitem__(self, key: slice) -> 'Dataset':
        pass

    def __getitem__(self, key):
        """
        Index an example by key value.

        Args:
            key: The key to index the example by. This key can either be a
                numeric key, or a slice.

        Returns:
            The corresponding example if the key is an int or the examples if
            the key is a slice in the form of another Dataset.

        Raises:
            TypeError: If the key is not an integer or slice.
        """
        if isinstance(key, int):
            return self._examples[key]

        if isinstance(key, slice):
            return Dataset(self._examples[key])

        raise TypeError('Dataset indices must be ints or slices.')

    @overload
    def __setitem__(self, key: int, example: LabeledExample) -> None:
        pass

    @overload
    def __setitem__(self, key: slice,
                    examples: Iterable[LabeledExample]) -> None:
        pass

    def __setitem__(self, key, item) -> None:
        self._examples[key] = item

    def __delitem__(self, key: Union[int, slice]) -> None:
        del self._examples[key]

    def __len__(self) -> int:
        return len(self._examples)
