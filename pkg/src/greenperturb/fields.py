"""Smooth scalar functions on the plane with closed-form derivatives.

Perturbation data (the interior function ``p``, conductivities ``lambda``,
Schrodinger potentials) are all represented by :class:`Polynomial2D` or by a
generic :class:`ScalarFunction` built from callables.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from numpy.polynomial import polynomial as P

__all__ = ["ScalarFunction", "Polynomial2D", "constant", "radial_square", "parse_polynomial"]


@dataclass(frozen=True)
class ScalarFunction:
    """A smooth real function ``f(x, y)`` with gradient and Laplacian.

    ``value``, ``grad`` and ``laplacian`` all take broadcastable arrays
    ``x, y``.  ``grad`` returns a pair ``(fx, fy)``.
    """

    value: Callable
    grad: Callable
    laplacian: Callable
    label: str = "f"

    def __call__(self, x, y):
        return self.value(x, y)

    def at(self, z):
        z = np.asarray(z)
        return self.value(z.real, z.imag)

    def sup_abs(self, points) -> float:
        points = np.asarray(points)
        return float(np.max(np.abs(self.at(points))))


@dataclass(frozen=True)
class Polynomial2D(ScalarFunction):
    """Bivariate polynomial ``sum c[i, j] x**i y**j``."""

    coeffs: np.ndarray = field(default_factory=lambda: np.zeros((1, 1)))

    @classmethod
    def from_coeffs(cls, coeffs, label: str | None = None) -> "Polynomial2D":
        c = np.atleast_2d(np.asarray(coeffs, dtype=float))
        cx = P.polyder(c, axis=0) if c.shape[0] > 1 else np.zeros((1, c.shape[1]))
        cy = P.polyder(c, axis=1) if c.shape[1] > 1 else np.zeros((c.shape[0], 1))
        cxx = P.polyder(c, 2, axis=0) if c.shape[0] > 2 else np.zeros((1, 1))
        cyy = P.polyder(c, 2, axis=1) if c.shape[1] > 2 else np.zeros((1, 1))

        def value(x, y):
            return P.polyval2d(x, y, c)

        def grad(x, y):
            return P.polyval2d(x, y, cx), P.polyval2d(x, y, cy)

        def laplacian(x, y):
            return P.polyval2d(x, y, cxx) + P.polyval2d(x, y, cyy)

        return cls(value, grad, laplacian, label or _describe(c), c)

    def scaled(self, factor: float) -> "Polynomial2D":
        return Polynomial2D.from_coeffs(factor * self.coeffs)

    def shifted(self, offset: float) -> "Polynomial2D":
        c = self.coeffs.copy()
        c[0, 0] += offset
        return Polynomial2D.from_coeffs(c)

    @property
    def is_constant(self) -> bool:
        c = self.coeffs.copy()
        c[0, 0] = 0.0
        return not np.any(c)


def constant(c: float) -> Polynomial2D:
    return Polynomial2D.from_coeffs([[float(c)]])


def radial_square(scale: float = 1.0) -> Polynomial2D:
    """``scale * |xi|**2``."""
    c = np.zeros((3, 3))
    c[2, 0] = c[0, 2] = scale
    return Polynomial2D.from_coeffs(c)


def _describe(c: np.ndarray) -> str:
    terms = []
    for i in range(c.shape[0]):
        for j in range(c.shape[1]):
            if c[i, j] != 0:
                mono = "*".join(s for s in (f"x^{i}" if i else "", f"y^{j}" if j else "") if s)
                terms.append(f"{c[i, j]:g}" + (f"*{mono}" if mono else ""))
    return " + ".join(terms) or "0"


_NUMBER = r"(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?"
_FACTOR = r"[xy](?:\^\d+)?"
_TERM = re.compile(
    rf"([+-])?({_NUMBER})?((?:\*?{_FACTOR})*)"
)


def parse_polynomial(text: str) -> Polynomial2D:
    """Parse ``"1 + 0.5*x^2 - y^2 + 2*x*y"`` into a :class:`Polynomial2D`.

    Only sums of monomials with numeric coefficients are accepted.
    """
    if re.search(r"[\d.]\s+[\d.]", text):
        raise ValueError(f"cannot parse polynomial {text!r}: separated digits")
    src = re.sub(r"\s+", "", text)
    if not src:
        raise ValueError("empty polynomial")
    coeffs: dict[tuple[int, int], float] = {}
    pos = 0
    while pos < len(src):
        m = _TERM.match(src, pos)
        sign, num, mono = m.group(1), m.group(2), m.group(3)
        if m.end() == pos or (num is None and not mono) or (pos > 0 and sign is None):
            raise ValueError(f"cannot parse polynomial {text!r} at position {pos}")
        if num is None and mono.startswith("*"):
            raise ValueError(f"cannot parse polynomial {text!r} at position {pos}")
        coef = (-1.0 if sign == "-" else 1.0) * (float(num) if num is not None else 1.0)
        i = j = 0
        for var, power in re.findall(r"([xy])(?:\^(\d+))?", mono):
            k = int(power) if power else 1
            if var == "x":
                i += k
            else:
                j += k
        coeffs[(i, j)] = coeffs.get((i, j), 0.0) + coef
        pos = m.end()
    c = np.zeros((max(i for i, _ in coeffs) + 1, max(j for _, j in coeffs) + 1))
    for (i, j), v in coeffs.items():
        c[i, j] = v
    return Polynomial2D.from_coeffs(c, label=text.strip())
