"""Differentiable objectives: least squares and a one-layer softmax classifier.

Classifier parameter layout (n = d*c + c):

    theta[i*c + j]  -> weight from input feature i to class j   (w_{i+1, j+1})
    theta[d*c + j]  -> bias of class j                          (b_{j+1})

Biases are ordinary coordinates and compete for the sparsity budget.
"""
import numpy as np

from .linalg import as_matrix, as_vector, gram, max_eigenvalue


class Objective:
    """Base class for a scalar objective over a flat parameter vector.

    Subclasses implement :meth:`value_and_gradient`; ``dim`` is the number of
    parameters.
    """

    dim: int

    def value_and_gradient(self, theta):
        raise NotImplementedError

    def value(self, theta):
        return self.value_and_gradient(theta)[0]

    def gradient(self, theta):
        return self.value_and_gradient(theta)[1]

    def _check(self, theta):
        theta = np.asarray(theta, dtype=np.float64)
        if theta.shape != (self.dim,):
            raise ValueError(f"expected parameter vector of length {self.dim}, got shape {theta.shape}")
        return theta


class QuadraticObjective(Objective):
    """f(theta) = 0.5 * ||X theta - y||^2."""

    def __init__(self, X, y):
        self.X = as_matrix(X, "X")
        self.y = as_vector(y, "y")
        if self.X.shape[0] != self.y.shape[0]:
            raise ValueError(f"X has {self.X.shape[0]} rows but y has {self.y.shape[0]} entries")
        self.dim = self.X.shape[1]

    def value_and_gradient(self, theta):
        theta = self._check(theta)
        r = self.X @ theta - self.y
        return 0.5 * float(r @ r), self.X.T @ r

    def lipschitz(self):
        """Global gradient Lipschitz constant, lambda_max(X^T X)."""
        return max_eigenvalue(gram(self.X))


def quadratic_value_grad(q, theta):
    return q.value_and_gradient(theta)


def _check_batch(features, labels, n_features, n_classes):
    features = as_matrix(features, "features")
    labels = np.asarray(labels)
    if features.shape[0] == 0:
        raise ValueError("empty batch")
    if features.shape[1] != n_features:
        raise ValueError(f"expected {n_features} features, got {features.shape[1]}")
    if labels.shape != (features.shape[0],):
        raise ValueError("labels must be a vector with one entry per sample")
    if not np.issubdtype(labels.dtype, np.integer):
        if not np.all(labels == np.round(labels)):
            raise ValueError("labels must be integers")
        labels = labels.astype(np.int64)
    if labels.min() < 0 or labels.max() >= n_classes:
        raise ValueError(f"labels must lie in [0, {n_classes})")
    return features, labels


def _logits(theta, features, n_features, n_classes):
    split = n_features * n_classes
    W = theta[:split].reshape(n_features, n_classes)
    return features @ W + theta[split:]


def classifier_value_grad(theta, features, labels, n_features=4, n_classes=3):
    """Mean softmax cross-entropy and its gradient for a one-layer network."""
    n = n_features * n_classes + n_classes
    theta = np.asarray(theta, dtype=np.float64)
    if theta.shape != (n,):
        raise ValueError(f"expected parameter vector of length {n}, got shape {theta.shape}")
    features, labels = _check_batch(features, labels, n_features, n_classes)
    m = features.shape[0]
    rows = np.arange(m)

    z = _logits(theta, features, n_features, n_classes)
    z = z - z.max(axis=1, keepdims=True)
    e = np.exp(z)
    total = e.sum(axis=1, keepdims=True)
    loss = float(np.mean(np.log(total[:, 0]) - z[rows, labels]))

    delta = e / total
    delta[rows, labels] -= 1.0
    delta /= m
    grad = np.concatenate([(features.T @ delta).ravel(), delta.sum(axis=0)])
    return loss, grad


def predict(theta, features, n_features=4, n_classes=3):
    """Argmax class per sample; ties go to the smallest class index."""
    theta = np.asarray(theta, dtype=np.float64)
    return np.argmax(_logits(theta, as_matrix(features), n_features, n_classes), axis=1)


def accuracy(theta, features, labels, n_features=4, n_classes=3):
    features, labels = _check_batch(features, labels, n_features, n_classes)
    return float(np.mean(predict(theta, features, n_features, n_classes) == labels))


def parameter_names(n_features=4, n_classes=3):
    names = [f"w{i + 1}{j + 1}" for i in range(n_features) for j in range(n_classes)]
    return names + [f"b{j + 1}" for j in range(n_classes)]


class OneLayerClassifier(Objective):
    """Softmax cross-entropy of a single dense layer, bound to one batch."""

    def __init__(self, features, labels, n_features=4, n_classes=3):
        self.n_features = n_features
        self.n_classes = n_classes
        self.features, self.labels = _check_batch(features, labels, n_features, n_classes)
        self.dim = n_features * n_classes + n_classes

    def value_and_gradient(self, theta):
        return classifier_value_grad(theta, self.features, self.labels, self.n_features, self.n_classes)

    def accuracy(self, theta):
        return accuracy(theta, self.features, self.labels, self.n_features, self.n_classes)


def finite_diff_gradient(obj, theta, h=1e-5):
    """Central-difference gradient, one coordinate at a time."""
    if h <= 0:
        raise ValueError("step h must be positive")
    theta = as_vector(theta, "theta")
    grad = np.empty_like(theta)
    step = np.zeros_like(theta)
    for i in range(theta.shape[0]):
        step[i] = h
        grad[i] = (obj.value(theta + step) - obj.value(theta - step)) / (2 * h)
        step[i] = 0.0
    return grad
