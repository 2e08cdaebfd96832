"""
A linear support vector machine with hinge loss and L2 regularization, trained
per class and composed one-vs-rest into a single-label multi-class classifier.

The binary problem is

    F(w, b) = 1/2 ||w||^2 + C sum_i max(0, 1 - y_i (w . x_i + b))

with an unregularized bias. It is solved in the dual, which carries the
equality constraint sum_i alpha_i y_i = 0 because of the free bias, by
decomposition over maximal violating pairs with second order working set
selection. The kernel is linear, so the primal weight vector is kept
explicitly and kernel columns are gathered from the sparse design matrix.
"""

import json
import logging
import math
import os
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
import scipy.sparse as sp

from pysilver.exception import ParseError, TrainingError
from pysilver.features import FeatureSpace, SparseBinaryVector, to_matrix

logger = logging.getLogger(__name__)

PathLike = Union[str, bytes, os.PathLike]

FORMAT_VERSION = 1

# Floor on the curvature of a pair update, for pairs of identical vectors.
TAU = 1e-12


class TrainConfig:
    """
    Solver settings. C weighs the hinge loss of every example. Training stops
    when the maximal violation of the optimality conditions drops below
    tolerance, or after max_epochs * n pair updates. The seed is recorded with
    the model; the solver itself is deterministic given the data order.
    """

    __slots__ = ['C', 'tolerance', 'max_epochs', 'seed', 'shrinking']

    def __init__(self,
                 C: float = 1.0,
                 tolerance: float = 1e-4,
                 max_epochs: int = 1000,
                 seed: int = 0,
                 shrinking: bool = True) -> None:
        """
        Create a TrainConfig.

        Args:
            C: The hinge loss weight.
            tolerance: The stopping threshold on the maximal violation.
            max_epochs: Bounds the number of pair updates to max_epochs * n.
            seed: The experiment seed.
            shrinking: Whether to temporarily remove bound variables that
                cannot be selected from the working set search.

        Raises:
            ValueError: If a value is out of range.
        """
        if not C > 0 or not math.isfinite(C):
            raise ValueError(f'C must be positive, got {C}')
        if not tolerance > 0:
            raise ValueError(f'tolerance must be positive, got {tolerance}')
        if max_epochs < 1:
            raise ValueError(f'max_epochs must be at least 1, got {max_epochs}')

        self.C = float(C)
        self.tolerance = float(tolerance)
        self.max_epochs = int(max_epochs)
        self.seed = int(seed)
        self.shrinking = bool(shrinking)

    @classmethod
    def from_json(cls, obj: Mapping[str, Any]) -> 'TrainConfig':
        """
        Create a TrainConfig from its JSON object. Missing keys take their
        defaults.

        Raises:
            ParseError: If there are unknown keys or invalid values.
        """
        unknown = set(obj) - set(cls.__slots__)
        if unknown:
            raise ParseError(f'Unknown train options: {sorted(unknown)}')

        try:
            return cls(**obj)
        except (TypeError, ValueError) as err:
            raise ParseError(f'Invalid train options: {err}') from err

    def to_json(self) -> Dict[str, Any]:
        return {
            'C': self.C,
            'tolerance': self.tolerance,
            'max_epochs': self.max_epochs,
            'seed': self.seed,
            'shrinking': self.shrinking
        }

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TrainConfig):
            return NotImplemented
        return self.to_json() == other.to_json()


class BinaryLinearModel:
    """
    The decision function w . x + b of one binary problem.
    """

    __slots__ = ['weights', 'bias']

    def __init__(self, weights: np.ndarray, bias: float) -> None:
        """
        Create a BinaryLinearModel.

        Args:
            weights: The dense weight vector, one entry per feature column.
            bias: The bias.

        Raises:
            TrainingError: If any value is not finite.
        """
        weights = np.asarray(weights, dtype=np.float64)
        if not np.all(np.isfinite(weights)) or not math.isfinite(bias):
            raise TrainingError('Model parameters must be finite')

        self.weights: np.ndarray = weights
        self.bias: float = float(bias)

    def decision(self, x: SparseBinaryVector) -> float:
        """
        The decision value of a binary vector, a sparse dot product.

        Args:
            x: The sorted column ids present.

        Returns:
            The sum of the weights at the present columns plus the bias.
        """
        return float(self.weights[list(x)].sum()) + self.bias

    def to_json(self) -> Dict[str, Any]:
        return {'weights': self.weights.tolist(), 'bias': self.bias}

    @classmethod
    def from_json(cls, obj: Mapping[str, Any]) -> 'BinaryLinearModel':
        try:
            return cls(np.array(obj['weights'], dtype=np.float64),
                       float(obj['bias']))
        except (KeyError, TypeError, ValueError) as err:
            raise ParseError('Malformed binary model') from err


class DualSolution:
    """
    The result of the dual solver: the dual variables, the primal solution they
    define, and how the solver ended.
    """
    def __init__(self, alpha: np.ndarray, weights: np.ndarray, bias: float,
                 iterations: int, violation: float, converged: bool) -> None:
        self.alpha = alpha
        self.weights = weights
        self.bias = bias
        self.iterations = iterations
        self.violation = violation
        self.converged = converged

    def model(self) -> BinaryLinearModel:
        return BinaryLinearModel(self.weights, self.bias)


class _KernelColumns:
    """
    Computes columns of the linear kernel matrix X X^T from a CSC copy of the
    design matrix.
    """
    def __init__(self, X: sp.csr_matrix) -> None:
        self._csr = X
        self._csc = X.tocsc()
        self._n = X.shape[0]

    def row(self, i: int) -> Tuple[np.ndarray, np.ndarray]:
        start, end = self._csr.indptr[i], self._csr.indptr[i + 1]
        return self._csr.indices[start:end], self._csr.data[start:end]

    def column(self, i: int) -> np.ndarray:
        cols, vals = self.row(i)
        if len(cols) == 0:
            return np.zeros(self._n)

        indptr = self._csc.indptr
        slices = [slice(indptr[c], indptr[c + 1]) for c in cols.tolist()]
        rows = np.concatenate([self._csc.indices[s] for s in slices])
        weights = np.concatenate(
            [self._csc.data[s] * v for s, v in zip(slices, vals.tolist())])

        return np.bincount(rows, weights=weights, minlength=self._n)


def _bias_from_gradient(y: np.ndarray, G: np.ndarray, alpha: np.ndarray,
                        C: float) -> float:
    """
    The bias implied by the optimality conditions. Free variables pin it down
    exactly and are averaged; without them any value between the bounds set by
    the bound variables is optimal and the midpoint is taken.
    """
    yG = y * G
    free = (alpha > 0) & (alpha < C)
    if free.any():
        return -float(yG[free].mean())

    at_upper = alpha >= C
    at_lower = alpha <= 0
    ub_mask = (at_upper & (y < 0)) | (at_lower & (y > 0))
    lb_mask = (at_upper & (y > 0)) | (at_lower & (y < 0))
    ub = float(yG[ub_mask].min()) if ub_mask.any() else None
    lb = float(yG[lb_mask].max()) if lb_mask.any() else None

    if ub is None:
        rho = lb
    elif lb is None:
        rho = ub
    else:
        rho = (ub + lb) / 2

    return -float(rho)


def _select_pair(active: np.ndarray, y: np.ndarray, alpha: np.ndarray,
                 G: np.ndarray, C: float, qd: np.ndarray,
                 kernel: _KernelColumns):
    """
    Second order working set selection over the active variables.

    Returns:
        A tuple (i, j, Ki, violation). i and j are None when the violation is
        already below every threshold, i.e. the set has no violating pair.
    """
    yA = y[active]
    aA = alpha[active]
    vA = -yA * G[active]

    up = ((yA > 0) & (aA < C)) | ((yA < 0) & (aA > 0))
    low = ((yA > 0) & (aA > 0)) | ((yA < 0) & (aA < C))
    if not up.any() or not low.any():
        return None, None, None, 0.0

    v_up = np.where(up, vA, -np.inf)
    ii = int(np.argmax(v_up))
    g_max = float(v_up[ii])
    g_min = float(np.where(low, vA, np.inf).min())
    violation = g_max - g_min

    candidates = low & (vA < g_max)
    if not candidates.any():
        return None, None, None, violation

    i = int(active[ii])
    Ki = kernel.column(i)

    grad_diff = g_max - vA
    quad = qd[i] + qd[active] - 2 * Ki[active]
    quad = np.where(quad > 0, quad, TAU)
    score = np.where(candidates, -grad_diff * grad_diff / quad, np.inf)
    j = int(active[int(np.argmin(score))])

    return i, j, Ki, violation


def _shrinkable(active: np.ndarray, y: np.ndarray, alpha: np.ndarray,
                G: np.ndarray, C: float) -> np.ndarray:
    """
    Mask of active bound variables that cannot be part of a violating pair at
    the current gradient.
    """
    yA = y[active]
    aA = alpha[active]
    vA = -yA * G[active]

    up = ((yA > 0) & (aA < C)) | ((yA < 0) & (aA > 0))
    low = ((yA > 0) & (aA > 0)) | ((yA < 0) & (aA < C))
    if not up.any() or not low.any():
        return np.zeros(len(active), dtype=bool)

    g_max = float(np.where(up, vA, -np.inf).max())
    g_min = float(np.where(low, vA, np.inf).min())

    only_up = up & ~low
    only_low = low & ~up
    return (only_up & (vA < g_min)) | (only_low & (vA > g_max))


def _update_pair(i: int, j: int, y: np.ndarray, alpha: np.ndarray,
                 G: np.ndarray, C: float, qd: np.ndarray,
                 Kij: float) -> Tuple[float, float]:
    """
    Solve the two variable subproblem of the pair in place.

    Returns:
        The new values of alpha[i] and alpha[j].
    """
    a_i = float(alpha[i])
    a_j = float(alpha[j])
    quad = qd[i] + qd[j] - 2 * Kij
    if quad <= 0:
        quad = TAU

    if y[i] != y[j]:
        delta = (-G[i] - G[j]) / quad
        diff = a_i - a_j
        a_i += delta
        a_j += delta
        if diff > 0:
            if a_j < 0:
                a_j = 0.0
                a_i = diff
        elif a_i < 0:
            a_i = 0.0
            a_j = -diff
        if diff > 0:
            if a_i > C:
                a_i = C
                a_j = C - diff
        elif a_j > C:
            a_j = C
            a_i = C + diff
    else:
        delta = (G[i] - G[j]) / quad
        total = a_i + a_j
        a_i -= delta
        a_j += delta
        if total > C:
            if a_i > C:
                a_i = C
                a_j = total - C
        elif a_j < 0:
            a_j = 0.0
            a_i = total
        if total > C:
            if a_j > C:
                a_j = C
                a_i = total - C
        elif a_i < 0:
            a_i = 0.0
            a_j = total

    if not (math.isfinite(a_i) and math.isfinite(a_j)):
        raise TrainingError('Solver produced a non-finite update')

    return a_i, a_j


def solve_dual(X: sp.csr_matrix, y: np.ndarray,
               config: TrainConfig) -> DualSolution:
    """
    Train one binary problem.

    Args:
        X: The design matrix, one row per example.
        y: The labels, +1 or -1, one per row.
        config: The solver settings.

    Returns:
        The dual solution and the primal model it defines.

    Raises:
        TrainingError: If only one class is present or the solver diverges.
    """
    X = sp.csr_matrix(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    n, d = X.shape
    if n != len(y):
        raise TrainingError(f'{n} rows but {len(y)} labels')
    if not ((y > 0).any() and (y < 0).any()):
        raise TrainingError('Training needs at least one positive and one negative example')

    C = config.C
    kernel = _KernelColumns(X)
    qd = np.asarray(X.multiply(X).sum(axis=1)).ravel()

    alpha = np.zeros(n)
    w = np.zeros(d)
    G = -np.ones(n)
    active = np.arange(n)

    max_iter = config.max_epochs * n
    shrink_every = min(n, 1000)
    counter = shrink_every
    iterations = 0
    violation = math.inf
    converged = False

    while iterations < max_iter:
        counter -= 1
        if config.shrinking and counter <= 0:
            counter = shrink_every
            keep = ~_shrinkable(active, y, alpha, G, C)
            if keep.any():
                active = active[keep]

        i, j, Ki, violation = _select_pair(active, y, alpha, G, C, qd, kernel)
        if i is None or violation < config.tolerance:
            G = y * (X @ w) - 1
            if len(active) == n:
                converged = True
                break

            # Converged on the shrunk problem; recheck against every variable.
            active = np.arange(n)
            counter = shrink_every
            i, j, Ki, violation = _select_pair(active, y, alpha, G, C, qd,
                                               kernel)
            if i is None or violation < config.tolerance:
                converged = True
                break

        Kj = kernel.column(j)
        new_i, new_j = _update_pair(i, j, y, alpha, G, C, qd, float(Ki[j]))
        step_i = (new_i - alpha[i]) * y[i]
        step_j = (new_j - alpha[j]) * y[j]
        alpha[i] = new_i
        alpha[j] = new_j

        cols, vals = kernel.row(i)
        w[cols] += step_i * vals
        cols, vals = kernel.row(j)
        w[cols] += step_j * vals
        G += y * (step_i * Ki + step_j * Kj)
        iterations += 1

    if not converged:
        G = y * (X @ w) - 1
        logger.warning(
            'Solver stopped after %d updates with violation %.3g above tolerance %.3g.',
            iterations, violation, config.tolerance)

    if not np.all(np.isfinite(w)):
        raise TrainingError('Solver produced non-finite weights')

    bias = _bias_from_gradient(y, G, alpha, C)
    return DualSolution(alpha, w, bias, iterations, violation, converged)


def objective(model: BinaryLinearModel, X: sp.spmatrix, y: np.ndarray,
              C: float) -> float:
    """
    The primal objective of a binary model on a training set.

    Args:
        model: The model.
        X: The design matrix.
        y: The +1/-1 labels.
        C: The hinge loss weight.

    Returns:
        1/2 ||w||^2 + C times the summed hinge loss.
    """
    margins = np.asarray(y, dtype=np.float64) * (X @ model.weights + model.bias)
    hinge = np.maximum(0.0, 1.0 - margins).sum()
    return 0.5 * float(model.weights @ model.weights) + C * float(hinge)


def dual_objective(solution: DualSolution) -> float:
    """
    The dual objective of a solution, a lower bound on the optimal primal
    objective.
    """
    return float(solution.alpha.sum()) - 0.5 * float(
        solution.weights @ solution.weights)


def train_binary(vectors: Sequence[SparseBinaryVector], y: Sequence[int],
                 n_features: int, config: TrainConfig) -> BinaryLinearModel:
    """
    Train a binary linear model on binary vectors.

    Args:
        vectors: The examples.
        y: +1 for positives, -1 for negatives, one per example.
        n_features: The number of feature columns.
        config: The solver settings.

    Returns:
        The trained model.

    Raises:
        TrainingError: If only one class is present or the solver diverges.
    """
    X = to_matrix(vectors, n_features)
    return solve_dual(X, np.asarray(y, dtype=np.float64), config).model()


class MulticlassModel:
    """
    One binary head per class, predicting the class with the highest decision
    value. The model also records the feature space, the solver settings, and
    the text pipeline settings the training data went through, so that it can
    be applied to raw text later.
    """
    def __init__(self,
                 class_list: Sequence[str],
                 heads: Mapping[str, BinaryLinearModel],
                 feature_space: FeatureSpace,
                 config: TrainConfig,
                 pipeline: Optional[Mapping[str, Any]] = None,
                 metadata: Optional[Mapping[str, Any]] = None) -> None:
        """
        Create a MulticlassModel.

        Args:
            class_list: The classes, in head order.
            heads: Class to its binary model.
            feature_space: The feature space of the heads.
            config: The solver settings the heads were trained with.
            pipeline: The text pipeline settings, as JSON.
            metadata: Facts about the training data, as JSON.

        Raises:
            TrainingError: If the heads do not match the classes or the feature
                space.
        """
        if set(heads) != set(class_list):
            raise TrainingError('There must be exactly one head per class')
        for label, head in heads.items():
            if len(head.weights) != len(feature_space):
                raise TrainingError(
                    f'Head {label} has {len(head.weights)} weights for {len(feature_space)} features'
                )

        self.class_list: List[str] = list(class_list)
        self.heads: Dict[str, BinaryLinearModel] = {
            label: heads[label]
            for label in self.class_list
        }
        self.feature_space = feature_space
        self.config = config
        self.pipeline: Dict[str, Any] = dict(pipeline or {})
        self.metadata: Dict[str, Any] = dict(metadata or {})

        if self.class_list:
            self._W = np.vstack([self.heads[c].weights for c in self.class_list])
        else:
            self._W = np.zeros((0, len(feature_space)))
        self._b = np.array([self.heads[c].bias for c in self.class_list])

    def decision_matrix(self, X: sp.spmatrix) -> np.ndarray:
        """
        The decision values of many examples at once.

        Args:
            X: The design matrix over this model's feature space.

        Returns:
            An (examples, classes) array.
        """
        return np.asarray(X @ self._W.T) + self._b

    def to_json(self) -> Dict[str, Any]:
        return {
            'format_version': FORMAT_VERSION,
            'class_list': list(self.class_list),
            'feature_space': self.feature_space.to_json(),
            'heads': {c: self.heads[c].to_json()
                      for c in self.class_list},
            'config': self.config.to_json(),
            'pipeline': dict(self.pipeline),
            'metadata': dict(self.metadata)
        }

    @classmethod
    def from_json(cls, obj: Mapping[str, Any]) -> 'MulticlassModel':
        """
        Create a model from its JSON object.

        Raises:
            ParseError: If the object is malformed or of another format version.
        """
        version = obj.get('format_version')
        if version != FORMAT_VERSION:
            raise ParseError(f'Unsupported model format version {version!r}')

        try:
            class_list = obj['class_list']
            heads = {
                c: BinaryLinearModel.from_json(obj['heads'][c])
                for c in class_list
            }
            space = FeatureSpace.from_json(obj['feature_space'])
            config = TrainConfig.from_json(obj['config'])
        except (KeyError, TypeError) as err:
            raise ParseError('Malformed model') from err

        return cls(class_list, heads, space, config, obj.get('pipeline'),
                   obj.get('metadata'))

    def save(self, path: PathLike) -> None:
        """
        Write the model as JSON. Floats are written in their shortest exact
        decimal form, so loading gives back the identical model.
        """
        with open(path, 'w', encoding='utf-8') as f:
            json.dump(self.to_json(), f, ensure_ascii=False)
            f.write('\n')

    @classmethod
    def load(cls, path: PathLike) -> 'MulticlassModel':
        """
        Read a model written by save.

        Raises:
            IOError: If the file cannot be opened.
            ParseError: If the file is not a model file.
        """
        with open(path, encoding='utf-8') as f:
            try:
                obj = json.load(f)
            except json.JSONDecodeError as err:
                raise ParseError(f'Model file {path!r} is not valid JSON') from err

        return cls.from_json(obj)


def train_ovr(corpus: Sequence[Tuple[SparseBinaryVector, str]],
              classes: Sequence[str], space: FeatureSpace,
              config: TrainConfig) -> MulticlassModel:
    """
    Train one binary head per class, each with the class's examples as
    positives and all other examples as negatives.

    Args:
        corpus: Pairs of (vector, class).
        classes: The classes, in head order.
        space: The feature space the vectors are over.
        config: The solver settings, shared by all heads.

    Returns:
        The multi-class model.

    Raises:
        TrainingError: If a class has no examples, naming it, or if a head
            fails to train.
    """
    labels = np.array([label for _, label in corpus], dtype=object)
    X = to_matrix([vector for vector, _ in corpus], len(space))

    heads = {}
    for label in classes:
        positives = labels == label
        if not positives.any():
            raise TrainingError(f'Class {label} has no training examples')

        y = np.where(positives, 1.0, -1.0)
        try:
            solution = solve_dual(X, y, config)
        except TrainingError as err:
            raise TrainingError(f'Failed to train the head of class {label}') from err

        logger.debug('Head %s: %d updates, violation %.3g.', label,
                     solution.iterations, solution.violation)
        heads[label] = solution.model()

    return MulticlassModel(classes, heads, space, config)


def decision_values(model: MulticlassModel,
                    x: SparseBinaryVector) -> Dict[str, float]:
    """
    The decision value of every class for one vector.

    Args:
        model: The model.
        x: The vector.

    Returns:
        Class to w_c . x + b_c, in class order.
    """
    return {label: model.heads[label].decision(x) for label in model.class_list}


def predict(model: MulticlassModel, x: SparseBinaryVector) -> str:
    """
    The class with the highest decision value. Ties go to the class earliest in
    the class list.

    Args:
        model: The model.
        x: The vector.

    Returns:
        The predicted class.
    """
    values = decision_values(model, x)
    scores = [values[c] for c in model.class_list]
    return model.class_list[int(np.argmax(scores))]


def predict_matrix(model: MulticlassModel, X: sp.spmatrix) -> List[str]:
    """
    Predict many examples at once, with the same tie rule as predict.

    Args:
        model: The model.
        X: The design matrix over the model's feature space.

    Returns:
        The predicted classes, one per row.
    """
    if X.shape[0] == 0:
        return []
    scores = model.decision_matrix(X)
    return [model.class_list[k] for k in np.argmax(scores, axis=1).tolist()]
