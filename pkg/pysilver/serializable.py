"""
The Serializable interface is a marker interface to show that a class is in the
pysilver record domain, such as a tweet, a video, or a labeled example, and
therefore has a to_json method that yields its JSON-lines object.
"""

import abc
from typing import Any, Dict


class Serializable(metaclass=abc.ABCMeta):
    """
    A Serializable mixin to indicate that the component can be converted into
    the JSON object written on one line of a corpus file.
    """
    @abc.abstractmethod
    def to_json(self) -> Dict[str, Any]:
        """
        Provides the JSON object representation of the component.

        Returns:
            A dict of JSON compatible values.

        Raises:
            NotImplementedError: If the child class does not implement the
                method.
        """
        raise NotImplementedError('No implementation for to_json')
