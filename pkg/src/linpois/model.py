"""Model container: Y = A X with independent X_i ~ Poisson(lambda_i)."""

from __future__ import annotations

import json
from functools import cached_property

import numpy as np

from .errors import InputError
from .intlinalg import SnfDecomposition, int_matrix, inverse_rational, snf
from .solutions import MethodTag, PreprocessReport, classify, preprocess

__all__ = ["PoissonModel", "model_from_dict", "load_model_file"]


class PoissonModel:
    """Immutable model of Y = A X, X_i independent Poisson(lambda_i).

    The matrix is preprocessed on construction: zero columns removed,
    dependent rows dropped with exact consistency relations kept in
    ``report``.  ``a``/``rates`` refer to the reduced system used for
    evaluation; ``a_full``/``rates_full`` keep the original shapes, and
    observations are always given against the original row count.
    Derived objects (SNF, rational inverse, method tag) are cached.
    """

    def __init__(self, a, rates, name: str | None = None, description: str | None = None):
        a_full = int_matrix(a)
        if a_full.shape[0] == 0 or a_full.shape[1] == 0:
            raise InputError("matrix needs at least one row and one column")
        try:
            rates_full = np.asarray(rates, dtype=np.float64)
        except (TypeError, ValueError) as exc:
            raise InputError(f"rates are not numeric: {exc}") from None
        a_red, rates_red, report = preprocess(a_full, rates_full)
        self._a_full = a_full
        self._rates_full = rates_full
        self._a = a_red
        self._rates = rates_red
        self._report = report
        self.name = name
        self.description = description

    @property
    def a(self) -> np.ndarray:
        """Reduced matrix: full row rank, no zero columns."""
        return self._a

    @property
    def rates(self) -> np.ndarray:
        return self._rates

    @property
    def report(self) -> PreprocessReport:
        return self._report

    @property
    def a_full(self) -> np.ndarray:
        return self._a_full

    @property
    def rates_full(self) -> np.ndarray:
        return self._rates_full

    @property
    def m(self) -> int:
        return self._a.shape[0]

    @property
    def n(self) -> int:
        return self._a.shape[1]

    @property
    def m_full(self) -> int:
        return self._a_full.shape[0]

    @property
    def n_full(self) -> int:
        return self._a_full.shape[1]

    @cached_property
    def snf(self) -> SnfDecomposition:
        return snf(self._a)

    @cached_property
    def method(self) -> MethodTag:
        if self.m == self.n:
            return classify(self._a)
        return classify(self._a, self.snf)

    @cached_property
    def inverse(self) -> np.ndarray:
        # only meaningful when method is INVERTIBLE
        return inverse_rational(self._a)

    def __repr__(self) -> str:
        tag = f" name={self.name!r}" if self.name else ""
        return f"PoissonModel({self.m_full}x{self.n_full}{tag})"


_MODEL_KEYS = {"a", "lambda", "name", "description"}


def model_from_dict(data) -> PoissonModel:
    """Build a model from the JSON schema {"a": [[...]], "lambda": [...]}.

    Optional keys: name, description.  Anything else is rejected so
    typos in fixtures fail loudly.
    """
    if not isinstance(data, dict):
        raise InputError("model must be a JSON object with keys 'a' and 'lambda'")
    unknown = sorted(set(data) - _MODEL_KEYS)
    if unknown:
        raise InputError(f"unknown model keys: {unknown}")
    for key in ("a", "lambda"):
        if key not in data:
            raise InputError(f"model is missing key '{key}'")
    for key in ("name", "description"):
        if key in data and not isinstance(data[key], str):
            raise InputError(f"model key '{key}' must be a string")
    return PoissonModel(
        data["a"],
        data["lambda"],
        name=data.get("name"),
        description=data.get("description"),
    )


def load_model_file(path) -> PoissonModel:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read model file {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"model file {path} is not valid JSON: {exc}") from None
    return model_from_dict(data)
