from pathlib import Path
from setuptools import setup

from util import parse


def make_relative(fn):
    """
    Make the filename relative to the current file.

    Args:
        fn: The filename to convert.

    Returns:
        The path relative to the current file.
    """
    return Path(__file__).parent / fn


setup(
    name = 'pysilver',
    packages = ['pysilver', 'pysilver.unit'],
    version = parse.package_version(make_relative('pysilver/_version.py')),
    description = 'Tweet topic classification trained on labels transferred from linked videos',
    long_description = make_relative('README.md').read_text(encoding='utf-8'),
    long_description_content_type = 'text/markdown',
    license = 'MIT',
    keywords = ['nlp', 'distant supervision', 'tweets', 'text classification', 'svm'],
    python_requires = '~=3.8',
    install_requires = parse.requirements(make_relative('deps/runtime.txt')),
    package_data = { 'pysilver': ['py.typed', 'data/scheme.json'] },
    entry_points = { 'console_scripts': ['pysilver = pysilver.cli:main'] },
    classifiers = [
        'Development Status :: 4 - Beta',
        'Intended Audience :: Science/Research',
        'License :: OSI Approved :: MIT License',
        'Programming Language :: Python :: 3 :: Only',
        'Programming Language :: Python :: Implementation :: CPython',
        'Topic :: Scientific/Engineering :: Artificial Intelligence',
        'Topic :: Text Processing :: Linguistic'
    ]
)
