"""Cone fields over the product flow and their measured hyperbolicity margins.

The model tangent space is R^k + R^(s+c+u): first the disk (chart) block,
then the restricted-flow blocks in the order stable, flow direction,
unstable.  Cones are metric balls of directions around a center subspace;
the restricted-flow block always evolves by the exact rate cocycle while
the disk block evolves by the tangent map of whichever flow a campaign
runs (uniformly slowed core in blow-up charts, or annulus transits).

The campaigns measure, rather than assume, the three quantities the cone
criterion needs: invariance of the unstable cone (after a reported burn-in),
its minimal expansion exponent, and the domination gap over vectors that
remain in the complementary cone.  In the uniformly slowed core the chart
dynamics is exactly linear, with disk-block exponents

    rho0 * rate_i   (radial)   and   rho0 * (rate_j - rate_i)  (projective),

so the admissibility threshold for rho0 is visible in the data: once the
projective spread rho0*(max-min) reaches the restricted unstable rate, the
unstable cone stops being invariant and domination fails.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import norm, qmc

from . import blowup, saddle
from .blowup import BlowupPoint
from .saddle import DEFAULT_STEP, AnosovModel, SaddleSpec


@dataclass(frozen=True)
class MetricSpec:
    """Diagonal model metric: the default product metric or a weighted one."""

    kind: str = "product"
    weights: tuple | None = None

    def __post_init__(self):
        if self.kind not in ("product", "weighted"):
            raise ValueError("metric kind must be 'product' or 'weighted'")
        if self.kind == "weighted":
            if self.weights is None or any(w <= 0 for w in self.weights):
                raise ValueError("weighted metric needs positive weights")
            object.__setattr__(self, "weights", tuple(float(w) for w in self.weights))

    def half_weights(self, dim):
        if self.kind == "product":
            return np.ones(dim)
        if len(self.weights) != dim:
            raise ValueError(f"metric has {len(self.weights)} weights, model dimension is {dim}")
        return np.sqrt(np.asarray(self.weights))


@dataclass(frozen=True)
class ConeSpec:
    """Directions within angle `aperture` of the span of `center` columns."""

    center: np.ndarray
    aperture: float

    def __post_init__(self):
        c = np.atleast_2d(np.asarray(self.center, dtype=float))
        if c.shape[0] < c.shape[1]:
            c = c.T
        object.__setattr__(self, "center", c)
        if not 0.0 < self.aperture < math.pi / 4:
            raise ValueError("aperture must lie in (0, pi/4)")
        gram = c.T @ c
        if np.abs(gram - np.eye(c.shape[1])).max() > 1e-12:
            raise ValueError("center basis must be orthonormal to 1e-12")


def angle_to_center(v, cone: ConeSpec, metric: MetricSpec | None = None):
    """Metric angle between v (or rows of v) and the cone's center subspace."""
    v = np.asarray(v, dtype=float)
    single = v.ndim == 1
    V = np.atleast_2d(v)
    w = MetricSpec().half_weights(V.shape[1]) if metric is None else metric.half_weights(V.shape[1])
    Vw = V * w
    C = cone.center * w[:, None]
    Q, _ = np.linalg.qr(C)
    norms = np.linalg.norm(Vw, axis=1)
    if (norms == 0).any():
        raise ValueError("zero vector has no direction")
    proj = np.linalg.norm(Vw @ Q, axis=1)
    cosang = np.clip(proj / norms, 0.0, 1.0)
    ang = np.arccos(cosang)
    return float(ang[0]) if single else ang


def in_cone(v, cone: ConeSpec, metric: MetricSpec | None = None):
    """Whether v lies strictly inside the cone."""
    return bool(angle_to_center(v, cone, metric) < cone.aperture)


# ---------------------------------------------------------------------------
# the product model and its frames


@dataclass(frozen=True)
class ProductModel:
    """Disk block + restricted-flow blocks, with index bookkeeping."""

    spec: SaddleSpec
    anosov: AnosovModel

    @property
    def dim(self):
        s, c, u = self.anosov.dims
        return self.spec.k + s + c + u

    @property
    def disk_slice(self):
        return slice(0, self.spec.k)

    @property
    def n_slice(self):
        return slice(self.spec.k, self.dim)

    def axes(self, which):
        """Unit vectors spanning a named block: 'disk' | 's' | 'c' | 'u' | 'cs'."""
        k = self.spec.k
        s, c, u = self.anosov.dims
        starts = {"disk": (0, k), "s": (k, k + s), "c": (k + s, k + s + c),
                  "u": (k + s + c, k + s + c + u)}
        if which == "cs":
            idx = list(range(0, k + s + c))
        else:
            a, b = starts[which]
            idx = list(range(a, b))
        E = np.zeros((self.dim, len(idx)))
        for j, i in enumerate(idx):
            E[i, j] = 1.0
        return E

    def unstable_cone(self, omega):
        return ConeSpec(center=self.axes("u"), aperture=omega)

    def center_stable_cone(self, omega):
        return ConeSpec(center=self.axes("cs"), aperture=omega)

    def full_map(self, J_disk, t):
        """Block tangent map: disk Jacobian + exact restricted cocycle."""
        M = np.zeros((self.dim, self.dim))
        M[self.disk_slice, self.disk_slice] = J_disk
        M[self.n_slice, self.n_slice] = self.anosov.cocycle(t)
        return M

    def reversed(self):
        """Time-reversed model: all rates negated, comparison constants swapped."""
        spec = SaddleSpec(rates=tuple(-r for r in self.spec.rates), c=self.spec.c)
        an = self.anosov
        anosov = AnosovModel(
            stable_rates=tuple(sorted(-r for r in an.unstable_rates)),
            unstable_rates=tuple(sorted(-r for r in an.stable_rates)),
            lam=1.0 / an.mu, mu=1.0 / an.lam)
        return ProductModel(spec=spec, anosov=anosov)


def sobol_directions(n, dim, seed):
    """Low-discrepancy unit vectors (Sobol points through the normal map)."""
    if dim == 1:
        return np.array([[1.0 if i % 2 == 0 else -1.0] for i in range(n)])
    eng = qmc.Sobol(d=dim, scramble=True, seed=seed)
    u = eng.random_base2(max(1, math.ceil(math.log2(max(n, 2)))))[:n]
    g = norm.ppf(np.clip(u, 1e-12, 1 - 1e-12))
    bad = np.linalg.norm(g, axis=1) < 1e-8
    g[bad] = 1.0
    return g / np.linalg.norm(g, axis=1, keepdims=True)


def cone_boundary_frame(model: ProductModel, cone: ConeSpec, n, seed,
                        include_axes=True):
    """Unit vectors on (and in) a cone: boundary tilts plus center axes.

    Boundary vectors sit at angle exactly `aperture`; the center axes are
    included because worst growth behavior lives both on the boundary and
    on the extreme center directions.
    """
    d = model.dim
    C = cone.center
    m = C.shape[1]
    # orthonormal complement
    full, _ = np.linalg.qr(np.hstack([C, np.eye(d)]))
    W = full[:, m:d]
    cdirs = sobol_directions(n, m, seed)
    wdirs = sobol_directions(n, d - m, seed + 1)
    vecs = (math.cos(cone.aperture) * cdirs @ C.T
            + math.sin(cone.aperture) * wdirs @ W.T)
    frames = [vecs]
    if include_axes:
        frames.append(C.T)
        frames.append(-C.T)
        # axis-aligned boundary tilts: worst cases of the closed-form bounds
        tilts = []
        for i in range(m):
            for j in range(d - m):
                tilts.append(math.cos(cone.aperture) * C[:, i]
                             + math.sin(cone.aperture) * W[:, j])
                tilts.append(math.cos(cone.aperture) * C[:, i]
                             - math.sin(cone.aperture) * W[:, j])
        frames.append(np.array(tilts))
    return np.vstack(frames)


# ---------------------------------------------------------------------------
# propagation


def propagate(flowkind, state, t, frame, *, spec, anosov, profile=None, rho0=None,
              step=DEFAULT_STEP):
    """Apply the block tangent map of the chosen flow to a frame of vectors.

    flowkind 'inner-product': uniformly slowed product at the disk point
    `state` (rho == rho0 must hold along the orbit).  'annulus': slow-down
    flow with the given bump profile at disk point `state`.  'lifted':
    chart dynamics at the BlowupPoint `state`.  frame rows are model
    tangent vectors; returns the propagated rows.
    """
    model = ProductModel(spec=spec, anosov=anosov)
    frame = np.atleast_2d(np.asarray(frame, dtype=float))
    if frame.shape[1] != model.dim:
        raise ValueError(f"frame vectors have dimension {frame.shape[1]}, model {model.dim}")
    if flowkind == "inner-product":
        if rho0 is None:
            raise ValueError("inner-product propagation needs rho0")
        flat = saddle.BumpProfile.flat(rho0)
        _, J = saddle.variational_flow_slow(spec, flat, state, t, step=step)
    elif flowkind == "annulus":
        if profile is None:
            raise ValueError("annulus propagation needs a bump profile")
        _, J = saddle.variational_flow_slow(spec, profile, state, t, step=step)
    elif flowkind == "lifted":
        if profile is None and rho0 is not None:
            profile = saddle.BumpProfile.flat(rho0)
        if profile is None:
            raise ValueError("lifted propagation needs a profile or rho0")
        _, J = blowup.lifted_variational_flow(spec, profile, state, t, step=step)
    else:
        raise ValueError(f"unknown flow kind {flowkind!r}")
    M = model.full_map(J, t)
    return frame @ M.T


# ---------------------------------------------------------------------------
# campaign reports


@dataclass
class PropagationReport:
    """Measured cone statistics over a batch of orbit segments."""

    kind: str
    n_orbits: int
    n_vectors: int
    times: list
    seed: int
    membership_fraction: dict = field(default_factory=dict)   # time -> fraction
    burn_in: float | None = None
    min_u_exponent: float = math.nan       # log growth rate on the unstable cone
    domination_exponent: float = math.nan  # log of the domination ratio rate
    backward_cs_ok: bool = True
    aperture_ratio: float | None = None    # crossing campaigns: out-angle / omega
    min_crossing_expansion: float | None = None
    backward_aperture_ratio: float | None = None
    min_backward_contraction: float | None = None
    violations: list = field(default_factory=list)
    extras: dict = field(default_factory=dict)

    @property
    def mu_meas(self):
        return math.exp(self.min_u_exponent)

    @property
    def kappa_meas(self):
        return math.exp(self.domination_exponent)

    def passed(self, min_exponent=None, demand_domination=True, max_burn_in=1.0):
        ok = not self.violations
        if self.burn_in is not None:
            ok = ok and self.burn_in <= max_burn_in
        if min_exponent is not None:
            ok = ok and self.min_u_exponent >= min_exponent
        if demand_domination:
            ok = ok and self.domination_exponent > 0.0
        return bool(ok)

    def to_dict(self):
        out = {
            "kind": self.kind,
            "n_orbits": self.n_orbits,
            "n_vectors": self.n_vectors,
            "times": [float(t) for t in self.times],
            "seed": self.seed,
            "membership_fraction": {str(k): float(v) for k, v in self.membership_fraction.items()},
            "burn_in": None if self.burn_in is None else float(self.burn_in),
            "min_u_exponent": float(self.min_u_exponent),
            "domination_exponent": float(self.domination_exponent),
            "backward_cs_ok": bool(self.backward_cs_ok),
            "n_violations": len(self.violations),
            "violations": self.violations[:5],
        }
        for key in ("aperture_ratio", "min_crossing_expansion",
                    "backward_aperture_ratio", "min_backward_contraction"):
            val = getattr(self, key)
            out[key] = None if val is None else float(val)
        out.update({k: (float(v) if isinstance(v, (int, float, np.floating)) else v)
                    for k, v in self.extras.items()})
        return out


def _inner_orbit_points(model: ProductModel, n_orbits, seed, radius):
    """Chart basepoints in the uniformly slowed core.

    The first k points are the chart fixed points (the invariant axis lines
    on the exceptional set): these are the orbits where the projective
    spread exponent acts for all time, hence the worst cases.  The rest mix
    generic exceptional-set points and nearby disk points across charts.
    """
    k = model.spec.k
    rng = np.random.default_rng(seed)
    pts = [BlowupPoint(chart=i, u=np.zeros(k)) for i in range(k)]
    for m in range(max(0, n_orbits - k)):
        chart = m % k
        u = rng.uniform(-0.6, 0.6, size=k)
        if m % 3 == 0:
            u[chart] = 0.0  # on the exceptional set
        else:
            line = u.copy()
            line[chart] = 1.0
            u[chart] = rng.uniform(0.2, 1.0) * radius / np.linalg.norm(line)
        pts.append(BlowupPoint(chart=chart, u=u))
    return pts


def inner_cone_campaign(spec, anosov, rho0, omega, *, n_vectors=1000, n_orbits=24,
                        times=(1.0, 2.0, 4.0), grid_step=0.25, metric=None,
                        seed=0, step=DEFAULT_STEP, reverse=False,
                        core_radius=None):
    """Cone invariance, expansion and domination in the uniformly slowed core.

    Orbits run in the blow-up charts (the exceptional set included), where
    the slowed field is exactly linear; the restricted block moves by the
    exact cocycle.  Reports: burn-in time after which every sampled
    unstable-cone boundary vector is strictly inside, the minimum expansion
    exponent over the unstable cone, the domination exponent against
    vectors that remain in the center-stable cone, and backward invariance
    of the center-stable cone.  `reverse` runs the time-reversed flow (the
    statistics must reproduce by symmetry of the construction).
    """
    model = ProductModel(spec=spec, anosov=anosov)
    if reverse:
        model = model.reversed()
        spec = model.spec
        anosov = model.anosov
    ucone = model.unstable_cone(omega)
    cscone = model.center_stable_cone(omega)
    uframe = cone_boundary_frame(model, ucone, n_vectors, seed)
    csframe = cone_boundary_frame(model, cscone, n_vectors, seed + 7)

    tmax = max(times)
    grid = [round(grid_step * i, 10) for i in range(1, int(round(tmax / grid_step)) + 1)]
    if core_radius is None:
        # keep whole segments inside the uniformly slowed core (and the disk)
        core_radius = min(0.012, 0.5 * math.exp(-rho0 * max(abs(r) for r in spec.rates) * tmax))
    points = _inner_orbit_points(model, n_orbits, seed + 3, core_radius)
    flat = saddle.BumpProfile.flat(rho0)
    res = blowup._lifted_flow_batch(spec, flat, points, tmax, step=step,
                                    want_jacobian=True, checkpoints=grid)

    report = PropagationReport(kind="reversed-core" if reverse else "core",
                               n_orbits=len(points), n_vectors=len(uframe),
                               times=list(times), seed=seed)
    min_u_exp = math.inf
    dom_exp = math.inf
    member_frac = {}
    burn_in = None
    cs_back_ok = True

    for it, t in enumerate(grid):
        charts, U, J = res.snapshots[t]
        inside_all = True
        for m in range(len(points)):
            M = model.full_map(J[m], t)
            vu = uframe @ M.T
            ang = angle_to_center(vu, ucone, metric)
            inside = ang < omega
            inside_all = inside_all and bool(inside.all())
            member_frac.setdefault(t, []).append(float(inside.mean()))
            growth_u = np.linalg.norm(vu, axis=1) / np.linalg.norm(uframe, axis=1)

            Minv = np.linalg.inv(M)
            wb = csframe @ Minv.T
            angb = angle_to_center(wb, cscone, metric)
            if not (angb < omega + 1e-12).all():
                cs_back_ok = False
                worst = int(np.argmax(angb))
                report.violations.append({
                    "type": "cs-backward-invariance", "time": t, "orbit": m,
                    "angle": float(angb[worst]), "aperture": omega})

            if t in times:
                expo_u = np.log(growth_u) / t
                min_u_exp = min(min_u_exp, float(expo_u.min()))
                vcs = csframe @ M.T
                angf = angle_to_center(vcs, cscone, metric)
                # staying vectors: inside the cs cone now (boundary tolerated)
                stay = angf <= omega + 1e-12
                if stay.any():
                    growth_cs = (np.linalg.norm(vcs[stay], axis=1)
                                 / np.linalg.norm(csframe[stay], axis=1))
                    expo_cs = np.log(growth_cs) / t
                    gap = float(expo_u.min() - expo_cs.max())
                    if gap < dom_exp:
                        dom_exp = gap
                    if gap <= 0:
                        report.violations.append({
                            "type": "domination", "time": t, "orbit": m,
                            "u_exponent": float(expo_u.min()),
                            "cs_exponent": float(expo_cs.max())})
        if inside_all and burn_in is None:
            burn_in = t
    # invariance after burn-in: membership must not regress
    if burn_in is None:
        report.violations.append({"type": "u-invariance", "detail": "never fully inside"})
    else:
        for t in grid:
            if t > burn_in and min(member_frac[t]) < 1.0:
                report.violations.append({
                    "type": "u-invariance", "time": t,
                    "fraction": min(member_frac[t])})

    report.membership_fraction = {t: float(np.mean(v)) for t, v in member_frac.items()}
    report.burn_in = burn_in
    report.min_u_exponent = min_u_exp
    report.domination_exponent = dom_exp
    report.backward_cs_ok = cs_back_ok
    report.extras["rho0"] = rho0
    report.extras["chart_spread_exponent"] = rho0 * (max(spec.rates) - min(spec.rates))
    return report


def crossing_cone_campaign(spec, profile, anosov, omega, *, n_entries=200,
                           n_vectors=200, metric=None, seed=0, step=DEFAULT_STEP):
    """Cone damage across the transition shell, measured per annulus transit.

    For each transit with tangent map M: the aperture ratio max angle(M v)
    / omega over unstable-cone vectors (how much the cone opens), the
    minimal expansion on the unstable cone, and the backward quantities for
    the center-stable cone.  The entries are seeded identically across
    delta values, so a sweep isolates the delta dependence.
    """
    model = ProductModel(spec=spec, anosov=anosov)
    ucone = model.unstable_cone(omega)
    cscone = model.center_stable_cone(omega)
    uframe = cone_boundary_frame(model, ucone, n_vectors, seed)
    csframe = cone_boundary_frame(model, cscone, n_vectors, seed + 7)

    rng = np.random.default_rng(seed + 11)
    entries = saddle.sample_entries(spec, profile.delta, n_entries, rng)
    reports = saddle._transit_batch(spec, profile, entries, step=step)

    report = PropagationReport(kind="crossing", n_orbits=len(reports),
                               n_vectors=len(uframe), times=[], seed=seed)
    aperture = 0.0
    min_grow = math.inf
    aperture_b = 0.0
    min_contract = math.inf
    distortion = 0.0
    t_max = 0.0
    classes = {"inner->outer": 0, "outer->inner": 0, "outer->outer": 0,
               "inner->inner": 0, "trapped": 0}
    for rep in reports:
        classes[rep.crossing_class] += 1
        if rep.exit_sphere == "trapped":
            continue
        distortion = max(distortion, rep.sigma_max)
        t_max = max(t_max, rep.time)
        M = model.full_map(rep.jacobian, rep.time)
        vu = uframe @ M.T
        aperture = max(aperture, float(angle_to_center(vu, ucone, metric).max()) / omega)
        min_grow = min(min_grow, float((np.linalg.norm(vu, axis=1)
                                        / np.linalg.norm(uframe, axis=1)).min()))
        Minv = np.linalg.inv(M)
        wb = csframe @ Minv.T
        aperture_b = max(aperture_b, float(angle_to_center(wb, cscone, metric).max()) / omega)
        min_contract = min(min_contract, float((np.linalg.norm(wb, axis=1)
                                                / np.linalg.norm(csframe, axis=1)).min()))
    report.aperture_ratio = aperture
    report.min_crossing_expansion = min_grow
    report.backward_aperture_ratio = aperture_b
    report.min_backward_contraction = min_contract
    report.extras["delta"] = profile.delta
    report.extras["class_counts"] = classes
    report.extras["transit_distortion"] = distortion
    report.extras["transit_time_max"] = t_max
    return report


def rate_chain_check(spec, anosov, rho0, *, region="far", times=(1.0, 2.0),
                     n_samples=100, seed=0, tol=1e-9, step=DEFAULT_STEP):
    """Three-scale chain: stable < lam^t < center < mu^t < unstable growth.

    Samples unit vectors in each invariant block of the product flow (disk
    directions count as center) and compares growth against the comparison
    constants.  The outer comparisons are tight for the block model, so
    they are asserted up to `tol`; the center comparisons must hold with a
    strictly positive margin, which is returned.  region 'far' uses the
    unperturbed flow, 'core' the uniformly slowed one.
    """
    model = ProductModel(spec=spec, anosov=anosov)
    rho = 1.0 if region == "far" else rho0
    rng = np.random.default_rng(seed)
    k = spec.k
    s, c, u = anosov.dims

    def block_dirs(E):
        m = E.shape[1]
        d = rng.standard_normal((max(n_samples // 4, 8), m))
        d /= np.linalg.norm(d, axis=1, keepdims=True)
        vecs = d @ E.T
        return np.vstack([vecs, E.T, -E.T])

    E_s = model.axes("s")
    E_c = np.hstack([model.axes("c"), model.axes("disk")])
    E_u = model.axes("u")

    lam, mu = anosov.lam, anosov.mu
    ok = True
    witnesses = []
    center_margin = math.inf
    for t in times:
        disk_J = np.diag(np.exp(rho * np.asarray(spec.rates) * t))
        M = model.full_map(disk_J, t)
        for name, E in (("s", E_s), ("c", E_c), ("u", E_u)):
            V = block_dirs(E)
            growth = np.linalg.norm(V @ M.T, axis=1) / np.linalg.norm(V, axis=1)
            lo, hi = float(growth.min()), float(growth.max())
            if name == "s" and hi > lam**t * (1.0 + tol):
                ok = False
                witnesses.append({"block": "s", "time": t, "growth": hi, "bound": lam**t})
            if name == "u" and lo < mu**t * (1.0 - tol):
                ok = False
                witnesses.append({"block": "u", "time": t, "growth": lo, "bound": mu**t})
            if name == "c":
                margin = min(math.log(lo) - t * math.log(lam), t * math.log(mu) - math.log(hi))
                center_margin = min(center_margin, margin / t)
                if margin <= 0:
                    ok = False
                    witnesses.append({"block": "c", "time": t, "low": lo, "high": hi,
                                      "lam_t": lam**t, "mu_t": mu**t})
    return {"ok": ok, "region": region, "rho0": rho0,
            "center_margin": center_margin, "witnesses": witnesses}
