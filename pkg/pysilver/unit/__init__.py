"""
The record types of a distant supervision corpus: posts, the videos they link,
the labeled examples derived from both, the class scheme the labels come from,
and datasets of labeled examples.
"""

__all__ = ['dataset', 'example', 'scheme', 'tweet', 'video']
