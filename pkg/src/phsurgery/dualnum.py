"""First-order dual numbers for exact forward-mode differentiation.

Components are generic: nesting Dual inside Dual yields exact second
derivatives, which is what the exterior-calculus layer relies on for
its d^2 = 0 probes.
"""

from __future__ import annotations

import math


class Dual:
    """Number a + b*eps with eps^2 = 0."""

    __slots__ = ("re", "du")

    def __init__(self, re, du=0.0):
        self.re = re
        self.du = du

    def __repr__(self):
        return f"Dual({self.re!r}, {self.du!r})"

    def __add__(self, other):
        if isinstance(other, Dual):
            return Dual(self.re + other.re, self.du + other.du)
        return Dual(self.re + other, self.du)

    __radd__ = __add__

    def __neg__(self):
        return Dual(-self.re, -self.du)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, Dual):
            return Dual(self.re * other.re, self.re * other.du + self.du * other.re)
        return Dual(self.re * other, self.du * other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Dual):
            inv = 1.0 / other.re
            return Dual(self.re * inv, (self.du * other.re - self.re * other.du) * inv * inv)
        return Dual(self.re / other, self.du / other)

    def __rtruediv__(self, other):
        inv = 1.0 / self.re
        return Dual(other * inv, -other * self.du * inv * inv)

    def __pow__(self, p):
        if isinstance(p, int):
            if p == 0:
                return Dual(1.0, 0.0)
            if p < 0:
                return 1.0 / (self ** (-p))
            out = self
            for _ in range(p - 1):
                out = out * self
            return out
        # real exponent: positive base only
        return dexp(p * dlog(self))

    # comparisons act on real parts so piecewise code branches correctly
    def __lt__(self, other):
        return value(self) < value(other)

    def __le__(self, other):
        return value(self) <= value(other)

    def __gt__(self, other):
        return value(self) > value(other)

    def __ge__(self, other):
        return value(self) >= value(other)

    def __float__(self):
        raise TypeError("implicit Dual -> float cast would drop the derivative")


def value(x):
    """Real part of a possibly nested dual number."""
    while isinstance(x, Dual):
        x = x.re
    return x


def _lift(f, dfdx):
    def apply(x):
        if isinstance(x, Dual):
            return Dual(apply(x.re), dfdx(x.re) * x.du)
        return f(x)

    return apply


dexp = _lift(math.exp, lambda a: dexp(a))
dlog = _lift(math.log, lambda a: 1.0 / a)
dsqrt = _lift(math.sqrt, lambda a: 0.5 / dsqrt(a))
dsin = _lift(math.sin, lambda a: dcos(a))
dcos = _lift(math.cos, lambda a: -dsin(a))


def dabs(x):
    """|x| with derivative sign(re x); undefined at 0 like the real abs."""
    if isinstance(x, Dual):
        s = 1.0 if value(x) >= 0 else -1.0
        return x * s
    return abs(x)


def seed(x, i):
    """Copy of point x (a sequence) with coordinate i seeded for d/dx_i."""
    return [Dual(c, 1.0) if j == i else Dual(c, 0.0) for j, c in enumerate(x)]


def _du(y):
    return y.du if isinstance(y, Dual) else 0.0


def partial(f, x, i):
    """Exact partial derivative of scalar f at point x."""
    return _du(f(seed(x, i)))


def grad(f, x):
    return [partial(f, x, i) for i in range(len(x))]


def jacobian(fs, x):
    """Jacobian rows = component functions fs, columns = coordinates."""
    n = len(x)
    return [[_du(f(seed(x, j))) for j in range(n)] for f in fs]
