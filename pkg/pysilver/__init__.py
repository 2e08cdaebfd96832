"""
A library for training topic classifiers on short social posts from labels
transferred by distant supervision: posts that link a video inherit the video's
category.
"""

__all__ = [
    'cli', 'config', 'corpus', 'evaluation', 'exception', 'features', 'load',
    'pipeline', 'serializable', 'svm', 'textproc', 'unit'
]

from .load import load_examples_from_string, load_examples_from_file, \
       iter_examples_from_string, iter_examples_from_file, load_video_map, \
       iter_tweets_from_file, iter_tweets_from_resource
from ._version import __version__
