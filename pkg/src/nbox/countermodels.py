"""The three concrete models used to separate and test the logics.

* :func:`prop41_model` -- one world, every relation empty: every box formula
  is valid and the frame is (m,n)-accessible whenever m >= 1.
* :func:`prop43_model` -- two worlds a, b, all relations total except that
  a has no psi-successor; validates ``[]psi`` on a (0,n)-accessible frame.
* :func:`fig1_model` -- two worlds whose relation family is defined by
  recursion on formulas; validates ``[]^n phi -> phi`` for every phi but not
  ``~[]^(n+1) #f``.
"""

from __future__ import annotations

from .formula import (
    Bottom,
    Formula,
    Neg,
    Or,
    Var,
    leading_boxes,
    strip_boxes,
    to_text,
)
from .semantics import ExtensionalModel, IntensionalModel, Policy


def prop41_model() -> ExtensionalModel:
    return ExtensionalModel(("a",), {}, Policy.EMPTY, {})


def prop43_model(psi: Formula, n: int) -> ExtensionalModel:
    if n < 2:
        raise ValueError("n must be at least 2")
    if leading_boxes(psi) >= n - 1:
        raise ValueError(f"{to_text(psi)} has the form []^{n - 1}phi")
    return ExtensionalModel(("a", "b"), {psi: [("b", "a"), ("b", "b")]}, Policy.TOTAL, {})


def fig1_relation(n: int):
    """``rel(x, phi, y)`` for the two-world model of :func:`fig1_model`."""

    def a_to_b(phi: Formula) -> bool:
        sigma = strip_boxes(phi, n - 1)
        return False if sigma is None else by_sigma(sigma)

    def by_sigma(sigma: Formula) -> bool:
        # a R_([]^(n-1) sigma) b, by recursion on sigma
        if isinstance(sigma, Bottom):
            return True
        if isinstance(sigma, Var):
            return False
        if isinstance(sigma, Neg):
            return not by_sigma(sigma.child)
        if isinstance(sigma, Or):
            return by_sigma(sigma.left) and by_sigma(sigma.right)
        return a_to_b(sigma.child)

    def rel(x: str, phi: Formula, y: str) -> bool:
        if x == "b":
            return True
        if y == "a":
            return False
        return a_to_b(phi)

    return rel


def fig1_model(n: int) -> IntensionalModel:
    if n < 2:
        raise ValueError("n must be at least 2")
    return IntensionalModel(("a", "b"), fig1_relation(n), lambda w, p: True, name=f"fig1({n})")
