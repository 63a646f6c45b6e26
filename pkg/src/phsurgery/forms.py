"""Exterior calculus in dimension <= 6 over dual-number coefficients.

Forms carry coefficient *functions* indexed by strictly increasing index
tuples; derivatives are taken exactly with first-order dual numbers at
evaluation time, so d, interior product, Lie derivative and wedge are all
closed operations on coefficient closures.  This keeps the volume-form
bookkeeping honest: the d^2 = 0, Cartan and Leibniz identities are checked
at probes, not assumed.

The second half implements the equivariant volume normalization for the
standard 4-dimensional saddle: the invariant primitive eta0, the averaged
density solution beta, and the normalizing flow map.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .dualnum import Dual, partial, seed, value

MAX_DIM = 6


class DegreeError(ValueError):
    pass


class PathDegenerate(RuntimeError):
    """The interpolated volume family lost positivity somewhere."""

    def __init__(self, s, x, density):
        self.s = s
        self.x = np.asarray(x)
        self.density = density
        super().__init__(f"degenerate density {density:.3g} at s={s:.3f}, x={self.x}")


def _const(c):
    return lambda x: c


@dataclass
class Form:
    """Exterior form of fixed degree with callable coefficients.

    coeffs maps strictly increasing index tuples to functions of the point;
    missing tuples are zero.  Coefficients must accept dual components.
    """

    dim: int
    degree: int
    coeffs: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.dim > MAX_DIM:
            raise DegreeError(f"dimension {self.dim} exceeds supported maximum {MAX_DIM}")
        if not 0 <= self.degree <= self.dim:
            raise DegreeError(f"degree {self.degree} out of range for dimension {self.dim}")
        for idx in self.coeffs:
            if list(idx) != sorted(set(idx)):
                raise DegreeError(f"index tuple {idx} is not strictly increasing")
            if len(idx) != self.degree:
                raise DegreeError(f"index tuple {idx} has wrong length for degree {self.degree}")

    @classmethod
    def zero(cls, dim, degree):
        return cls(dim, degree, {})

    @classmethod
    def volume(cls, dim):
        return cls(dim, dim, {tuple(range(dim)): _const(1.0)})

    @classmethod
    def from_scalar(cls, dim, f):
        return cls(dim, 0, {(): f})

    def evaluate(self, x):
        """Coefficient values at x as a dict (dual-friendly)."""
        return {idx: f(x) for idx, f in self.coeffs.items()}

    def coefficient(self, x, idx):
        f = self.coeffs.get(tuple(idx))
        return f(x) if f is not None else 0.0

    def __add__(self, other):
        if (self.dim, self.degree) != (other.dim, other.degree):
            raise DegreeError("can only add forms of equal dimension and degree")
        out = {}
        for idx in set(self.coeffs) | set(other.coeffs):
            fa, fb = self.coeffs.get(idx), other.coeffs.get(idx)
            if fa is None:
                out[idx] = fb
            elif fb is None:
                out[idx] = fa
            else:
                out[idx] = (lambda f, g: lambda x: f(x) + g(x))(fa, fb)
        return Form(self.dim, self.degree, out)

    def __sub__(self, other):
        return self + other.scale(_const(-1.0))

    def scale(self, g):
        """Multiply by a scalar function (or constant)."""
        if not callable(g):
            g = _const(g)
        return Form(self.dim, self.degree,
                    {idx: (lambda f: lambda x: g(x) * f(x))(f) for idx, f in self.coeffs.items()})


def _insert_index(j, idx):
    """Insert j into the increasing tuple idx; returns (tuple, sign) or None."""
    if j in idx:
        return None
    pos = sum(1 for i in idx if i < j)
    return tuple(idx[:pos]) + (j,) + tuple(idx[pos:]), (-1) ** pos


def d(form: Form) -> Form:
    """Exterior derivative; coefficients differentiated with dual numbers."""
    if form.degree >= form.dim:
        raise DegreeError("d of a top-degree form overflows; it vanishes identically")
    terms = {}
    for idx, f in form.coeffs.items():
        for j in range(form.dim):
            ins = _insert_index(j, idx)
            if ins is None:
                continue
            new_idx, sign = ins
            terms.setdefault(new_idx, []).append((sign, j, f))

    def make(termlist):
        def coeff(x):
            total = 0.0
            for sign, j, f in termlist:
                total = total + sign * _partial_at(f, x, j)
            return total

        return coeff

    return Form(form.dim, form.degree + 1, {idx: make(t) for idx, t in terms.items()})


def _partial_at(f, x, j):
    """d f / d x_j at a point whose entries may already be dual."""
    xs = [Dual(c, 1.0 if m == j else 0.0) for m, c in enumerate(x)]
    out = f(xs)
    return out.du if isinstance(out, Dual) else 0.0


def wedge(a: Form, b: Form) -> Form:
    if a.dim != b.dim:
        raise DegreeError("wedge needs a common dimension")
    if a.degree + b.degree > a.dim:
        raise DegreeError(f"wedge degree {a.degree}+{b.degree} overflows dimension {a.dim}")
    out = {}
    for ia, fa in a.coeffs.items():
        for ib, fb in b.coeffs.items():
            if set(ia) & set(ib):
                continue
            merged = tuple(sorted(ia + ib))
            sign = _merge_sign(ia, ib)
            prod = (lambda f, g, s: lambda x: s * f(x) * g(x))(fa, fb, sign)
            if merged in out:
                out[merged] = (lambda f, g: lambda x: f(x) + g(x))(out[merged], prod)
            else:
                out[merged] = prod
    return Form(a.dim, a.degree + b.degree, out)


def _merge_sign(ia, ib):
    """Sign of the shuffle sorting ia + ib."""
    seq = list(ia + ib)
    sign = 1
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                sign = -sign
    return sign


def interior(X, form: Form) -> Form:
    """Contraction with the vector field X (list of component functions)."""
    if form.degree == 0:
        raise DegreeError("cannot contract a 0-form")
    out = {}
    for idx, f in form.coeffs.items():
        for pos, j in enumerate(idx):
            rest = idx[:pos] + idx[pos + 1:]
            sign = (-1) ** pos
            term = (lambda f, Xj, s: lambda x: s * Xj(x) * f(x))(f, X[j], sign)
            if rest in out:
                out[rest] = (lambda g, h: lambda x: g(x) + h(x))(out[rest], term)
            else:
                out[rest] = term
    return Form(form.dim, form.degree - 1, out)


def lie(X, form: Form) -> Form:
    """Lie derivative along X via the Leibniz expansion.

    L_X (f dx_I) = (Xf) dx_I + f * sum_m dx_{i_1} ^ ... ^ dX^{i_m} ^ ...;
    independent of the Cartan route, which `lie_cartan` provides for
    cross-checking.
    """
    n = form.dim
    out = {}

    def add(idx, fn):
        if idx in out:
            out[idx] = (lambda g, h: lambda x: g(x) + h(x))(out[idx], fn)
        else:
            out[idx] = fn

    for idx, f in form.coeffs.items():
        def xf(x, f=f):
            total = 0.0
            for j in range(n):
                total = total + X[j](x) * _partial_at(f, x, j)
            return total

        add(idx, xf)
        for pos, im in enumerate(idx):
            for j in range(n):
                # replace slot pos by j with coefficient d_j X^{i_m}
                if j == im:
                    add(idx, (lambda f, Xm, j: lambda x: f(x) * _partial_at(Xm, x, j))(f, X[im], j))
                    continue
                if j in idx:
                    continue
                rest = idx[:pos] + idx[pos + 1:]
                ins = _insert_index(j, rest)
                if ins is None:
                    continue
                new_idx, s_ins = ins
                s_rem = (-1) ** pos
                sgn = s_rem * s_ins
                add(new_idx, (lambda f, Xm, j, s: lambda x: s * f(x) * _partial_at(Xm, x, j))
                    (f, X[im], j, sgn))
    return Form(n, form.degree, out)


def lie_cartan(X, form: Form) -> Form:
    """L_X = i_X d + d i_X (the homotopy formula)."""
    first = interior(X, d(form)) if form.degree < form.dim else Form.zero(form.dim, form.degree)
    second = d(interior(X, form)) if form.degree > 0 else Form.zero(form.dim, form.degree)
    return first + second


def form_max_at(form: Form, probes) -> float:
    """Largest coefficient magnitude over a batch of probe points."""
    worst = 0.0
    for x in probes:
        for v in form.evaluate(list(x)).values():
            worst = max(worst, abs(value(v)))
    return worst


# ---------------------------------------------------------------------------
# slowed-volume identity


def verify_rho_volume(rho, X, m: Form, probes):
    """Residuals of the slow-down volume identity at probe points.

    Checks first that L_X m = 0 (the input volume is invariant), then
    returns (max |L_{rho X} (m/rho)|, max |L_{rho X} m|): the first is the
    identity under test, the second its negative control (dividing by rho
    is what makes the slowed flow volume preserving).
    """
    base = form_max_at(lie(X, m), probes)
    if base > 1e-9:
        raise ValueError(f"input volume is not invariant: max |L_X m| = {base:.3g}")
    rhoX = [(lambda Xi: lambda x: rho(x) * Xi(x))(Xi) for Xi in X]
    m_over_rho = m.scale(lambda x: 1.0 / rho(x))
    residual = form_max_at(lie(rhoX, m_over_rho), probes)
    control = form_max_at(lie(rhoX, m), probes)
    return residual, control


# ---------------------------------------------------------------------------
# equivariant volume normalization (dimension 4 saddle)


def saddle_field(n=4):
    """Generator of the standard 4-d saddle: rates (-1, -1, +1, +1)."""
    if n != 4:
        raise DegreeError("the normalization machinery is built for the 4-d saddle")
    signs = (-1.0, -1.0, 1.0, 1.0)
    return [(lambda s, i: lambda x: s * x[i])(s, i) for i, s in enumerate(signs)]


def moser_eta0(n=4) -> Form:
    """Invariant primitive of the standard volume: x1 dx2 ^ dx3 ^ dx4."""
    if n != 4:
        raise DegreeError("eta0 is the 4-d primitive")
    return Form(4, 3, {(1, 2, 3): lambda x: x[0]})


def moser_beta(gamma):
    """Solve d/dx1 (x1 beta) = gamma by radial averaging.

    beta(x) = (1/x1) * integral of gamma(q, x2, x3, x4) for q in [0, x1],
    with the removable value beta(0, .) = gamma(0, .).  The quadrature is
    adaptive Simpson to 1e-12; dual first-order terms propagate through the
    integrand and the moving endpoint, so beta can be differentiated like
    any other coefficient.  If gamma is invariant under the saddle flow, so
    is beta.
    """

    def beta(x):
        x1 = x[0]
        a = value(x1)
        rest = list(x[1:])
        if a == 0.0:
            # removable singularity: beta = gamma(0,.) + (d1 gamma)(0,.) x1/2
            g0 = gamma([x1 * 0.0] + rest)
            slope = _partial_at(lambda y: gamma(list(y)), [0.0] + [value(c) for c in rest], 0)
            return g0 + 0.5 * slope * x1

        def integrand(q):
            return gamma([q] + rest)

        total = _adaptive_simpson(integrand, 0.0, a, 1e-12)
        if isinstance(x1, Dual) or any(isinstance(c, Dual) for c in rest):
            total = total + (x1 - a) * gamma([x1] + rest)  # moving endpoint
        return total / x1

    return beta


def _adaptive_simpson(f, a, b, tol, depth=24):
    fa, fm, fb = f(a), f(0.5 * (a + b)), f(b)
    whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    return _simpson_rec(f, a, b, fa, fm, fb, whole, tol, depth)


def _simpson_rec(f, a, b, fa, fm, fb, whole, tol, depth):
    m = 0.5 * (a + b)
    lm, rm = 0.5 * (a + m), 0.5 * (m + b)
    flm, frm = f(lm), f(rm)
    left = (m - a) / 6.0 * (fa + 4.0 * flm + fm)
    right = (b - m) / 6.0 * (fm + 4.0 * frm + fb)
    err = left + right - whole
    if depth <= 0 or abs(value(err)) <= 15.0 * tol:
        return left + right + err / 15.0
    half = 0.5 * tol
    return (_simpson_rec(f, a, m, fa, flm, fm, left, half, depth - 1)
            + _simpson_rec(f, m, b, fm, frm, fb, right, half, depth - 1))


@dataclass
class MoserMap:
    """Normalizing diffeomorphism between the flat volume and alpha * volume.

    h = h(1) of the interpolation flow for omega_s = ((1-s) + s*alpha) vol,
    built so that h transports the flat volume to the alpha one:
    det Dh(x) * alpha(h(x)) = 1.  The generating field Y_s is radial along
    x1 (the invariant-primitive direction) and commutes with the saddle.
    """

    alpha: object
    radius: float
    steps: int = 1000
    _beta: object = field(default=None, repr=False)

    def __post_init__(self):
        if self._beta is None:
            gamma = (lambda a: lambda x: a(x) - 1.0)(self.alpha)
            self._beta = moser_beta(gamma)

    def density(self, s, x):
        return (1.0 - s) + s * self.alpha(x)

    def velocity(self, s, x):
        """Y_s solving  i_{Y_s} omega_s = -(omega_1 - omega_0) primitive.

        With eta = beta * eta0 the only nonzero component is along x1:
        Y_1 = -beta(x) x1 / density_s(x).
        """
        den = self.density(s, x)
        if value(den) <= 0.0:
            raise PathDegenerate(s, [value(c) for c in x], value(den))
        v = [0.0, 0.0, 0.0, 0.0]
        v[0] = -self._beta(x) * x[0] / den
        return v

    def _integrate(self, x, s0, s1):
        x = [float(c) for c in x]
        h = (s1 - s0) / self.steps
        s = s0
        for _ in range(self.steps):
            k1 = self.velocity(s, x)
            y = [c + 0.5 * h * k for c, k in zip(x, k1)]
            k2 = self.velocity(s + 0.5 * h, y)
            y = [c + 0.5 * h * k for c, k in zip(x, k2)]
            k3 = self.velocity(s + 0.5 * h, y)
            y = [c + h * k for c, k in zip(x, k3)]
            k4 = self.velocity(s + h, y)
            x = [c + (h / 6.0) * (a + 2 * b + 2 * cc + dd)
                 for c, a, b, cc, dd in zip(x, k1, k2, k3, k4)]
            if math.sqrt(sum(c * c for c in x)) > self.radius:
                raise PathDegenerate(s, x, math.nan)
            s += h
        return np.array(x)

    def __call__(self, x):
        return self._integrate(x, 0.0, 1.0)

    def inverse(self, y):
        return self._integrate(y, 1.0, 0.0)

    def jacobian(self, x, eps=1e-6):
        J = np.zeros((4, 4))
        for i in range(4):
            e = np.zeros(4)
            e[i] = eps
            J[:, i] = (self(np.asarray(x) + e) - self(np.asarray(x) - e)) / (2 * eps)
        return J

    def transport_residuals(self, x):
        """Both readings of the volume transport at a point.

        forward: det Dh(x) * alpha(h(x)) - 1   (h carries the flat volume to
        the alpha volume); inverse: det Dh^{-1}(y) - alpha(y) at y = h(x).
        """
        J = self.jacobian(x)
        y = self(x)
        forward = float(np.linalg.det(J)) * float(value(self.alpha(list(y)))) - 1.0
        Ji = np.zeros((4, 4))
        eps = 1e-6
        for i in range(4):
            e = np.zeros(4)
            e[i] = eps
            Ji[:, i] = (self.inverse(y + e) - self.inverse(y - e)) / (2 * eps)
        inverse = float(np.linalg.det(Ji)) - float(value(self.alpha(list(y))))
        return forward, inverse


def moser_flow(omega0: Form, omega1: Form, radius, steps=1000) -> MoserMap:
    """Normalizing map between two 4-d volume forms omega1 = alpha * omega0.

    omega0 must be the standard volume; alpha must be positive on the
    domain and invariant under the saddle flow with alpha(0) = 1 for the
    commutation property to hold (checked by the audits, not assumed here).
    """
    if omega0.dim != 4 or omega0.degree != 4 or omega1.degree != 4:
        raise DegreeError("volume normalization is implemented for 4-d volume forms")
    idx = (0, 1, 2, 3)
    base = omega0.coeffs.get(idx)
    if base is None:
        raise DegreeError("omega0 must be the standard volume")
    probe = [0.137, -0.071, 0.053, 0.119]
    if abs(value(base(probe)) - 1.0) > 1e-12:
        raise DegreeError("omega0 must have unit density")
    top1 = omega1.coeffs.get(idx)
    if top1 is None:
        raise DegreeError("omega1 has no volume coefficient")
    return MoserMap(alpha=top1, radius=radius, steps=steps)


def equivariance_audit(h: MoserMap, X, probes, s_values=(0.0, 0.5, 1.0)):
    """Largest commutator |[X, Y_s]| over probes and interpolation times.

    [X, Y](x) = DY(x) X(x) - DX(x) Y(x), assembled with dual numbers; zero
    exactly when the normalizing field commutes with the saddle.
    """
    worst = 0.0
    witness = None
    for s in s_values:
        for x in probes:
            x = [float(c) for c in x]
            Xx = [value(Xi(x)) for Xi in X]
            Yx = [value(c) for c in h.velocity(s, x)]
            DY = np.array([[_partial_at(lambda y, i=i: h.velocity(s, list(y))[i], x, j)
                            for j in range(4)] for i in range(4)])
            DX = np.array([[_partial_at(lambda y, i=i: X[i](list(y)), x, j)
                            for j in range(4)] for i in range(4)])
            comm = DY @ np.asarray(Xx) - DX @ np.asarray(Yx)
            size = float(np.linalg.norm(comm))
            if size > worst:
                worst = size
                witness = {"s": s, "x": x, "commutator": comm.tolist()}
    return worst, witness


def invariant_products():
    """Generators x1 x3, x1 x4, x2 x3, x2 x4 of the saddle-invariant algebra."""
    pairs = [(0, 2), (0, 3), (1, 2), (1, 3)]
    return [(lambda i, j: lambda x: x[i] * x[j])(i, j) for i, j in pairs]
