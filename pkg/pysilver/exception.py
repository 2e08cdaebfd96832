"""
Holds custom pysilver errors. These errors include parsing errors when reading
corpus files, labels outside the class scheme, and errors raised when the data
handed to a pipeline stage cannot support it.
"""


class ParseError(ValueError):
    """
    Error that results from an improper value into a parsing routine.
    """


class SchemeError(ValueError):
    """
    Error that results from a label or category that the class scheme does not
    define, or from an inconsistent scheme definition.
    """


class CorpusError(ValueError):
    """
    Error that results from a corpus that cannot be split or folded as asked,
    for example a class with fewer examples than the holdout size.
    """


class TrainingError(ValueError):
    """
    Error that results from degenerate training data or a diverging solver.
    """


class EvaluationError(ValueError):
    """
    Error that results from an evaluation that is undefined, such as scoring an
    empty test set.
    """
