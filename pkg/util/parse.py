"""
A set of utilities for parsing configuration information out of the project.
Currently this is the version, which is specified once but used in packaging
and documentation generation, and the runtime requirements, which are kept in
the deps directory next to the build and dev pins.
"""

from typing import List, Union
from pathlib import Path
import re


def package_version(path: Union[str, Path]) -> str:
    """
    Parse the version from specified file, assumed to be a versioner module.

    Args:
        path: The path of the file to parse.

    Returns:
        The parsed version file.

    Raises:
        ValueError: If the file is deemed not clear enough to determine version
            information.
    """
    contents = Path(path).read_text(encoding='utf-8')

    m = re.search('__version__\\s*=\\s*[\'"]((\\d+\\.)+(\\d+))[\'"]', contents)

    if not m:
        raise ValueError(
            'There is no version string identified in the file contents.')

    return m.group(1)


def requirements(path: Union[str, Path]) -> List[str]:
    """
    Parse the requirement specifiers out of a pip requirements file. Comments,
    blank lines, and options such as -r are skipped.

    Args:
        path: The path of the requirements file.

    Returns:
        The requirement specifiers in file order.
    """
    reqs = []
    for line in Path(path).read_text(encoding='utf-8').splitlines():
        line = line.split('#', 1)[0].strip()
        if line and not line.startswith('-'):
            reqs.append(line)

    return reqs
