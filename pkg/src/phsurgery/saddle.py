"""Linear hyperbolic saddle, radial slow-down, and annulus transit statistics.

The model flow on the unit disk D^k is x' = rho(x) * diag(rates) * x, where
rho(x) = rhobar(|x|) is a radial bump equal to rho0 inside radius delta and
equal to 1 outside radius 2*delta.  Everything here is deterministic: fixed
step RK4, event location by bisection, seeded sampling.

Scale invariance is the organizing fact: rhobar's transition has width delta
by construction, so x -> x/delta conjugates the annulus dynamics at scale
delta to the one at scale 1.  Transit times and transit Jacobians are
therefore delta-independent, which the campaign in `transit_campaign`
measures rather than assumes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .dualnum import Dual, dexp, dsqrt, value

# Transition sharpness for the flat-ended bump profile.  sigma(r)=exp(-M/r)
# gives sup|S'| ~= 1.5616 (measured on a 2e6 grid); the steeper M=1 variant
# has sup|S'| = 2 exactly, which breaks the strict slope bound |rhobar'|<1/delta
# for every rho0 <= 1/2.
_TRANSITION_SHARPNESS = 0.75
_TRANSITION_SUP_SLOPE = 1.5617


class DomainEscape(RuntimeError):
    """Trajectory left the unit disk (or the chart atlas)."""

    def __init__(self, time, point):
        self.time = time
        self.point = np.asarray(point)
        super().__init__(f"trajectory escaped at t={time:.6g}, |x|={np.linalg.norm(self.point):.6g}")


class NonExitingOrbit(RuntimeError):
    """Annulus orbit exhausted its time budget without reaching a boundary sphere."""


class InfeasibleRates(ValueError):
    """Rate configuration violates a required inequality; message names it."""


# ---------------------------------------------------------------------------
# domain types


@dataclass(frozen=True)
class SaddleSpec:
    """Diagonal linear saddle x' = diag(rates) x on D^k.

    rates must contain at least one negative and one positive entry.  The
    derived per-time bounds exp(min rate) <= |Da^t v|/|v| <= exp(max rate)
    hold with constant c = 1 because the generator is diagonal; `c` is kept
    as a field for future block saddles.
    """

    rates: tuple
    c: float = 1.0

    def __post_init__(self):
        rates = tuple(float(r) for r in self.rates)
        object.__setattr__(self, "rates", rates)
        if len(rates) < 2:
            raise InfeasibleRates("saddle dimension must be >= 2")
        if not any(r < 0 for r in rates) or not any(r > 0 for r in rates):
            raise InfeasibleRates("saddle needs at least one negative and one positive rate")

    @property
    def k(self):
        return len(self.rates)

    @property
    def lam_prime(self):
        """Slowest contraction bound: exp(min rate) <= 1."""
        return math.exp(min(self.rates))

    @property
    def mu_prime(self):
        """Fastest expansion bound: exp(max rate) >= 1."""
        return math.exp(max(self.rates))

    @property
    def matrix(self):
        return np.diag(self.rates)

    def generator(self, x):
        """X(x) = diag(rates) * x."""
        return np.asarray(self.rates) * np.asarray(x)


@dataclass(frozen=True)
class AnosovModel:
    """Block model of the restricted flow: stable / flow-direction / unstable.

    The center block is exactly the flow direction with rate 0.  lam and mu
    are the comparison constants of the three-scale rate chain and must
    bracket the block rates: stable <= log lam < 0 < log mu <= unstable.
    """

    stable_rates: tuple
    unstable_rates: tuple
    lam: float
    mu: float

    def __post_init__(self):
        object.__setattr__(self, "stable_rates", tuple(float(r) for r in self.stable_rates))
        object.__setattr__(self, "unstable_rates", tuple(float(r) for r in self.unstable_rates))
        if not (0 < self.lam < 1 < self.mu):
            raise InfeasibleRates("need lam < 1 < mu")
        if not all(r <= math.log(self.lam) for r in self.stable_rates):
            raise InfeasibleRates("stable rates must be <= log(lam) < 0")
        if not all(r >= math.log(self.mu) for r in self.unstable_rates):
            raise InfeasibleRates("unstable rates must be >= log(mu) > 0")

    @property
    def dims(self):
        return (len(self.stable_rates), 1, len(self.unstable_rates))

    @property
    def rates(self):
        """Full rate tuple in block order (stable, flow, unstable)."""
        return self.stable_rates + (0.0,) + self.unstable_rates

    def cocycle(self, t):
        """Tangent map diag(exp(rate*t)) of the block model."""
        return np.diag(np.exp(np.asarray(self.rates) * t))


def _transition(r):
    """Flat-ended C-infinity increasing step [0,1] -> [0,1]; works on duals."""
    if isinstance(r, Dual):
        if r <= 0.0:
            return Dual(0.0, 0.0)
        if r >= 1.0:
            return Dual(1.0, 0.0)
        a = dexp(-_TRANSITION_SHARPNESS / r)
        b = dexp(-_TRANSITION_SHARPNESS / (1.0 - r))
        return a / (a + b)
    r = np.asarray(r, dtype=float)
    out = np.where(r >= 1.0, 1.0, 0.0)
    inside = (r > 0.0) & (r < 1.0)
    ri = np.clip(r, 1e-12, 1 - 1e-12)
    with np.errstate(under="ignore"):
        a = np.exp(-_TRANSITION_SHARPNESS / ri)
        b = np.exp(-_TRANSITION_SHARPNESS / (1.0 - ri))
    out = np.where(inside, a / (a + b), out)
    if np.ndim(r) == 0:
        return float(out)
    return out


def _transition_slope(r):
    """Closed-form derivative of `_transition` on (0, 1)."""
    r = np.asarray(r, dtype=float)
    m = _TRANSITION_SHARPNESS
    ri = np.clip(r, 1e-12, 1 - 1e-12)
    with np.errstate(under="ignore"):
        a = np.exp(-m / ri)
        b = np.exp(-m / (1.0 - ri))
        da = a * m / ri**2
        db = b * m / (1.0 - ri) ** 2
        val = (da * b + a * db) / (a + b) ** 2
    val = np.where((r <= 0.0) | (r >= 1.0), 0.0, val)
    if np.ndim(r) == 0:
        return float(val)
    return val


@dataclass(frozen=True)
class BumpProfile:
    """Radial slow-down profile rhobar on [0, inf).

    rhobar = rho0 on [0, delta], rises strictly on (delta, 2*delta) through a
    flat-ended smooth transition, and equals 1 from 2*delta on.  Construction
    rejects parameters for which the slope bound |rhobar'| < 1/delta cannot
    hold, i.e. (1 - rho0) * sup|S'| >= 1.
    """

    delta: float
    rho0: float
    constant: bool = False  # rhobar == rho0 everywhere (analysis helper)

    def __post_init__(self):
        if not self.delta > 0:
            raise ValueError("delta must be positive")
        if self.constant:
            if not self.rho0 > 0:
                raise ValueError("constant profile needs rho0 > 0")
            return
        if not 0 < self.rho0 < 1:
            raise ValueError("rho0 must lie in (0, 1)")
        if (1.0 - self.rho0) * _TRANSITION_SUP_SLOPE >= 1.0:
            raise ValueError(
                f"slope bound violated: (1-rho0)*sup|S'| = "
                f"{(1.0 - self.rho0) * _TRANSITION_SUP_SLOPE:.4f} >= 1"
            )

    @classmethod
    def flat(cls, rho0, delta=0.1):
        """Constant profile rhobar == rho0 (e.g. rho0=1 for the unperturbed saddle)."""
        return cls(delta=delta, rho0=rho0, constant=True)

    def value(self, s):
        """rhobar(s); accepts scalars, arrays, and duals."""
        if self.constant:
            if isinstance(s, Dual):
                return Dual(self.rho0, 0.0)
            return self.rho0 if np.ndim(s) == 0 else np.full(np.shape(s), self.rho0)
        r = (s - self.delta) / self.delta
        return self.rho0 + (1.0 - self.rho0) * _transition(r)

    def slope(self, s):
        """rhobar'(s), closed form."""
        if self.constant:
            return 0.0 if np.ndim(s) == 0 else np.zeros(np.shape(s))
        r = (np.asarray(s, dtype=float) - self.delta) / self.delta
        return (1.0 - self.rho0) / self.delta * _transition_slope(r)

    def __call__(self, x):
        """rho(x) = rhobar(|x|) for a point or an (n, k) batch."""
        x = np.asarray(x, dtype=float)
        return self.value(np.linalg.norm(x, axis=-1))


def eval_bump(profile: BumpProfile, x) -> float:
    """rho at a point of the open unit disk."""
    x = np.asarray(x, dtype=float)
    r = float(np.linalg.norm(x))
    if r >= 1.0:
        raise DomainEscape(0.0, x)
    return float(profile.value(r))


def pick_rho0(lam, mu, lam_prime, mu_prime, k=None, volume_mode=False):
    """Deterministic admissible slow-down exponent rho0.

    Returns the midpoint of the feasible interval (0, ub), where ub collects
    the slowed-rate domination bound (lam'/mu')^rho0 > max(lam, 1/mu) and, in
    volume mode, the two k-th-root bounds lam < lam'^(rho0/k) and
    mu'^(rho0/k) < mu.
    """
    if not lam < 1 < mu:
        raise InfeasibleRates(f"need lam < 1 < mu, got lam={lam}, mu={mu}")
    if not (lam < lam_prime <= 1):
        raise InfeasibleRates(f"need lam < lam' <= 1, got lam'={lam_prime}")
    if not (1 <= mu_prime < mu):
        raise InfeasibleRates(f"need 1 <= mu' < mu, got mu'={mu_prime}")
    if volume_mode and (k is None or k < 2):
        raise InfeasibleRates("volume mode needs the disk dimension k >= 2")

    ub = 1.0
    q = lam_prime / mu_prime
    floor = max(lam, 1.0 / mu)
    if q < 1.0:
        ub = min(ub, math.log(floor) / math.log(q))
    if volume_mode:
        if lam_prime < 1.0:
            ub = min(ub, k * math.log(lam) / math.log(lam_prime))
        if mu_prime > 1.0:
            ub = min(ub, k * math.log(mu) / math.log(mu_prime))
    if ub <= 0:
        raise InfeasibleRates("empty feasible interval for rho0")
    return 0.5 * ub


def domination_holds(rho0, lam, mu, lam_prime, mu_prime, k=None, volume_mode=False):
    """Check the inequalities that `pick_rho0` solves, at a given rho0."""
    ok = (lam_prime / mu_prime) ** rho0 > max(lam, 1.0 / mu)
    if volume_mode:
        ok = ok and lam < lam_prime ** (rho0 / k) and mu_prime ** (rho0 / k) < mu
    return bool(ok)


# ---------------------------------------------------------------------------
# integration

DEFAULT_STEP = 1e-3  # time units; the slowed field has O(1) time derivatives
# at every delta because the bump varies on the orbit's own time scale.


def _field(spec, profile, x):
    """rho(x) X(x) for a single point or an (n, k) batch."""
    x = np.asarray(x, dtype=float)
    rho = profile(x)
    return (np.asarray(spec.rates) * x) * (rho[..., None] if np.ndim(rho) else rho)


def _field_jacobian(spec, profile, x):
    """D(rho X)(x) = X(x) grad(rho)^T + rho diag(rates), batched (n,k,k)."""
    x = np.atleast_2d(np.asarray(x, dtype=float))
    r = np.linalg.norm(x, axis=-1)
    rho = profile.value(r)
    slope = profile.slope(r)
    rates = np.asarray(spec.rates)
    X = rates * x
    with np.errstate(invalid="ignore", divide="ignore"):
        gradrho = np.where(r[:, None] > 0, slope[:, None] * x / r[:, None], 0.0)
    return X[:, :, None] * gradrho[:, None, :] + rho[:, None, None] * np.diag(rates)[None, :, :]


def _rk4_step(f, y, h):
    k1 = f(y)
    k2 = f(y + 0.5 * h * k1)
    k3 = f(y + 0.5 * h * k2)
    k4 = f(y + h * k3)
    return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def flow_slow(spec, profile, x, t, step=DEFAULT_STEP):
    """Flow of x' = rho(x) X(x) for time t (either sign), fixed-step RK4.

    Raises DomainEscape as soon as the trajectory reaches the unit sphere.
    For rho == 1 this reproduces the closed form exp(t diag(rates)) x.
    """
    x = np.asarray(x, dtype=float).copy()
    if np.linalg.norm(x) >= 1.0:
        raise DomainEscape(0.0, x)
    if t == 0:
        return x
    sgn = 1.0 if t > 0 else -1.0
    total = abs(t)
    nsteps = max(1, int(math.ceil(total / step)))
    h = sgn * total / nsteps
    f = lambda y: _field(spec, profile, y)
    for i in range(nsteps):
        x = _rk4_step(f, x, h)
        if np.linalg.norm(x) >= 1.0:
            raise DomainEscape((i + 1) * h, x)
    return x


def variational_flow_slow(spec, profile, x, t, step=DEFAULT_STEP):
    """Flow together with its tangent map J(t), J' = D(rho X) J, J(0) = Id.

    Returns (point, J).  J stays orientation preserving; non-finite entries
    abort with diagnostics.
    """
    k = spec.k
    x = np.asarray(x, dtype=float)
    if np.linalg.norm(x) >= 1.0:
        raise DomainEscape(0.0, x)
    state = np.concatenate([x, np.eye(k).ravel()])
    if t == 0:
        return x.copy(), np.eye(k)
    sgn = 1.0 if t > 0 else -1.0
    total = abs(t)
    nsteps = max(1, int(math.ceil(total / step)))
    h = sgn * total / nsteps

    def f(y):
        pt = y[:k]
        J = y[k:].reshape(k, k)
        A = _field_jacobian(spec, profile, pt[None, :])[0]
        return np.concatenate([_field(spec, profile, pt), (A @ J).ravel()])

    for i in range(nsteps):
        state = _rk4_step(f, state, h)
        if not np.all(np.isfinite(state)):
            raise FloatingPointError(f"non-finite tangent state at t={(i + 1) * h:.6g}: {state}")
        if np.linalg.norm(state[:k]) >= 1.0:
            raise DomainEscape((i + 1) * h, state[:k])
    J = state[k:].reshape(k, k)
    if np.linalg.det(J) <= 0:
        raise FloatingPointError("tangent map lost orientation")
    return state[:k], J


def richardson_residual(spec, profile, x, t, step=DEFAULT_STEP):
    """Endpoint difference between step h and step h/2 integrations."""
    a = flow_slow(spec, profile, x, t, step=step)
    b = flow_slow(spec, profile, x, t, step=step / 2.0)
    return float(np.linalg.norm(a - b))


# ---------------------------------------------------------------------------
# annulus transits


@dataclass
class TransitReport:
    """One crossing of the annulus delta <= |x| <= 2*delta."""

    entry: np.ndarray
    exit: np.ndarray
    time: float
    sigma_max: float
    sigma_min: float
    entry_sphere: str  # "inner" | "outer"
    exit_sphere: str   # "inner" | "outer" | "trapped"
    jacobian: np.ndarray = field(repr=False, default=None)

    @property
    def crossing_class(self):
        if self.exit_sphere == "trapped":
            return "trapped"
        return f"{self.entry_sphere}->{self.exit_sphere}"


def _radial_speed_sign(spec, x):
    """Sign of d|x|/dt: the quadratic form sum(rates_i * x_i^2)."""
    x = np.asarray(x, dtype=float)
    return np.sum(np.asarray(spec.rates) * x * x, axis=-1)


def annulus_transit(spec, profile, entry, step=DEFAULT_STEP, budget=None,
                    distortion_cap=None):
    """Integrate one annulus crossing and report time and tangent distortion.

    `entry` must sit on a boundary sphere (radius delta or 2*delta) with
    velocity pointing into the annulus.  Exit through either sphere is
    located by bisection on the crossing step to 1e-10 in time.  Orbits that
    exhaust `budget` (default 10*ln2/rho0 flow time) raise NonExitingOrbit;
    campaigns catch this and count the orbit instead.  If `distortion_cap`
    is given, the report's singular values are checked against it.
    """
    reports = _transit_batch(spec, profile, np.asarray(entry, dtype=float)[None, :],
                             step=step, budget=budget)
    rep = reports[0]
    if rep.exit_sphere == "trapped":
        raise NonExitingOrbit(
            f"no boundary crossing within budget; last |x|={np.linalg.norm(rep.exit):.3e}")
    if distortion_cap is not None:
        if rep.sigma_max > distortion_cap or rep.sigma_min < 1.0 / distortion_cap:
            raise FloatingPointError(
                f"distortion {rep.sigma_max:.3g} exceeds configured cap {distortion_cap}")
    return rep


def _transit_batch(spec, profile, entries, step=DEFAULT_STEP, budget=None):
    """Vectorized annulus transits; one TransitReport per entry row."""
    delta = profile.delta
    k = spec.k
    n = entries.shape[0]
    if budget is None:
        budget = 10.0 * math.log(2.0) / profile.rho0

    r0 = np.linalg.norm(entries, axis=1)
    entry_sphere = np.where(np.abs(r0 - delta) < np.abs(r0 - 2 * delta), "inner", "outer")
    for i in range(n):
        target = delta if entry_sphere[i] == "inner" else 2 * delta
        if abs(r0[i] - target) > 1e-8 * delta:
            raise ValueError(f"entry {i} not on a boundary sphere: |x|={r0[i]:.6g}")
        q = _radial_speed_sign(spec, entries[i])
        if entry_sphere[i] == "inner" and q <= 0:
            raise ValueError(f"entry {i} on the inner sphere must move outward")
        if entry_sphere[i] == "outer" and q >= 0:
            raise ValueError(f"entry {i} on the outer sphere must move inward")

    x = entries.copy()
    J = np.tile(np.eye(k), (n, 1, 1))
    t = np.zeros(n)
    alive = np.ones(n, dtype=bool)
    exit_x = entries.copy()
    exit_t = np.zeros(n)
    exit_J = J.copy()
    exit_sphere = np.array(["trapped"] * n, dtype=object)

    def stage(xa, Ja):
        A = _field_jacobian(spec, profile, xa)
        return _field(spec, profile, xa), np.einsum("nij,njk->nik", A, Ja)

    def rk4(xa, Ja, h):
        k1x, k1J = stage(xa, Ja)
        k2x, k2J = stage(xa + 0.5 * h * k1x, Ja + 0.5 * h * k1J)
        k3x, k3J = stage(xa + 0.5 * h * k2x, Ja + 0.5 * h * k2J)
        k4x, k4J = stage(xa + h * k3x, Ja + h * k3J)
        return (xa + (h / 6.0) * (k1x + 2 * k2x + 2 * k3x + k4x),
                Ja + (h / 6.0) * (k1J + 2 * k2J + 2 * k3J + k4J))

    nmax = int(math.ceil(budget / step))
    for _ in range(nmax):
        if not alive.any():
            break
        xa, Ja = x[alive], J[alive]
        xn, Jn = rk4(xa, Ja, step)
        rn = np.linalg.norm(xn, axis=1)
        out_hi = rn >= 2 * delta
        out_lo = rn <= delta
        # entries start on a sphere; ignore the entry sphere at t ~ 0 by the
        # strict crossing direction enforced above (first step moves inside)
        idx = np.flatnonzero(alive)
        crossed = out_hi | out_lo
        if crossed.any():
            for j in np.flatnonzero(crossed):
                gi = idx[j]
                target = 2 * delta if out_hi[j] else delta
                tau = _bisect_crossing(spec, profile, x[gi], J[gi], step, target)
                xe, Je = rk4(x[gi][None, :], J[gi][None, :], tau)
                exit_x[gi] = xe[0]
                exit_J[gi] = Je[0]
                exit_t[gi] = t[gi] + tau
                exit_sphere[gi] = "outer" if out_hi[j] else "inner"
            alive[idx[crossed]] = False
        keep = ~crossed
        x[idx[keep]] = xn[keep]
        J[idx[keep]] = Jn[keep]
        t[idx[keep]] += step

    reports = []
    for i in range(n):
        if exit_sphere[i] == "trapped":
            reports.append(TransitReport(entries[i], x[i], t[i], math.nan, math.nan,
                                         str(entry_sphere[i]), "trapped", J[i]))
            continue
        s = np.linalg.svd(exit_J[i], compute_uv=False)
        reports.append(TransitReport(entries[i], exit_x[i], exit_t[i],
                                     float(s.max()), float(s.min()),
                                     str(entry_sphere[i]), str(exit_sphere[i]), exit_J[i]))
    return reports


def _bisect_crossing(spec, profile, x0, J0, h, target, tol=1e-10):
    """Crossing time tau in (0, h] with |x(tau)| = target, bisected to tol."""

    def radius(tau):
        if tau == 0.0:
            return np.linalg.norm(x0)
        y = _rk4_step(lambda z: _field(spec, profile, z), x0.copy(), tau)
        return np.linalg.norm(y)

    lo, hi = 0.0, h
    sign_hi = radius(h) - target
    for _ in range(200):
        if hi - lo < tol:
            break
        mid = 0.5 * (lo + hi)
        if (radius(mid) - target) * sign_hi > 0:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


@dataclass
class TransitCampaign:
    """Summary of a batch of annulus transits at one delta."""

    delta: float
    times: np.ndarray
    sigma_max: np.ndarray
    sigma_min: np.ndarray
    class_counts: dict
    distortion: float           # sup over transits of max singular value
    distortion_inv: float       # sup of 1/min singular value
    trapped: int
    worst: TransitReport | None


def sample_entries(spec, delta, n, rng, inner_fraction=0.5):
    """Seeded boundary-sphere entries pointing into the annulus.

    Directions are drawn once per seed and scaled to the requested radius,
    so sweeps over delta see literally the same direction set.  Pure axis
    entries are prepended so the closed-form crossings are always sampled.
    """
    k = spec.k
    axes = []
    for i, r in enumerate(spec.rates):
        e = np.zeros(k)
        e[i] = 1.0
        if r > 0:
            axes.append(e * delta)          # radial unstable entry, inner sphere
        else:
            axes.append(e * 2 * delta)      # radial stable entry, outer sphere
    n_inner = int(inner_fraction * n)
    inner, outer = [], []
    while sum(len(b) for b in inner) < n_inner or sum(len(b) for b in outer) < n - n_inner:
        dirs = rng.standard_normal((4 * n, k))
        dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
        q = np.sum(np.asarray(spec.rates) * dirs**2, axis=1)
        inner.append(dirs[q > 1e-6])
        outer.append(dirs[q < -1e-6])
    inner = np.vstack(inner)[:n_inner] * delta
    outer = np.vstack(outer)[: n - n_inner] * 2 * delta
    return np.vstack(axes + [inner, outer])


def transit_campaign(spec, profile, n_entries, seed, step=DEFAULT_STEP, budget=None):
    """Measure transit times and tangent distortion over seeded entries."""
    rng = np.random.default_rng(seed)
    entries = sample_entries(spec, profile.delta, n_entries, rng)
    reports = _transit_batch(spec, profile, entries, step=step, budget=budget)
    crossed = [r for r in reports if r.exit_sphere != "trapped"]
    counts = {"inner->outer": 0, "outer->inner": 0, "outer->outer": 0,
              "inner->inner": 0, "trapped": 0}
    for r in reports:
        counts[r.crossing_class] += 1
    sig_max = np.array([r.sigma_max for r in crossed])
    sig_min = np.array([r.sigma_min for r in crossed])
    worst = max(crossed, key=lambda r: r.sigma_max, default=None)
    return TransitCampaign(
        delta=profile.delta,
        times=np.array([r.time for r in crossed]),
        sigma_max=sig_max,
        sigma_min=sig_min,
        class_counts=counts,
        distortion=float(sig_max.max()) if len(crossed) else math.nan,
        distortion_inv=float((1.0 / sig_min).max()) if len(crossed) else math.nan,
        trapped=counts["trapped"],
        worst=worst,
    )


def shear_bound_margin(spec, profile, x, v):
    """Margin of <D(rho X) v, v> <= (C2 |grad rho| |x| + C3) |v|^2.

    C2 = max|rates| and C3 = log(mu') depend only on the saddle.  Returns
    rhs - lhs (nonnegative when the bound holds).
    """
    x = np.asarray(x, dtype=float)
    v = np.asarray(v, dtype=float)
    A = _field_jacobian(spec, profile, x[None, :])[0]
    lhs = float(v @ A @ v)
    r = float(np.linalg.norm(x))
    c2 = max(abs(np.asarray(spec.rates)))
    c3 = math.log(spec.mu_prime)
    rhs = (c2 * abs(float(profile.slope(r))) * r + c3) * float(v @ v)
    return rhs - lhs
