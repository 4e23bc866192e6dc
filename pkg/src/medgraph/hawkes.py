"""Linear multivariate Hawkes processes with exponential kernels.

The model is the continuous-time mediation example: observable processes
A (exposure), M (mediator), D (outcome), L (proxy) plus a latent process U
feeding L and D.  The module provides cluster-representation simulation,
exact and empirical integrated covariance, and the moment-based
identification of the direct (G_DA) and mediated (G_DM * G_MA) effects from
the observable covariance alone.

Conventions: G[i, j] is the expected number of direct i-events caused by one
j-event (the integral of the kernel g_ij); kernels are g_ij(t) =
G_ij * beta_ij * exp(-beta_ij t).
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass

import numpy as np

from .errors import (ConfigurationError, DataError, EstimationError,
                     IdentificationError, SizeError)

RADIUS_TOL = 1e-10
SOLVER_AGREEMENT_TOL = 1e-10
EVENT_BUDGET = 10_000_000

FIG7_NAMES = ("A", "M", "D", "L", "U")


# -- model ---------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class HawkesModel:
    mu: np.ndarray
    branching: np.ndarray           # G[i, j] = integral of g_ij
    decay: np.ndarray               # beta[i, j] > 0
    names: tuple[str, ...] = ()
    observed: tuple[int, ...] = ()  # indices of observable processes
    topology: str | None = None     # 'fig7' enables structure checks

    def __post_init__(self):
        mu = np.asarray(self.mu, dtype=float)
        g = np.asarray(self.branching, dtype=float)
        beta = np.asarray(self.decay, dtype=float)
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "branching", g)
        object.__setattr__(self, "decay", beta)
        n = len(mu)
        if g.shape != (n, n) or beta.shape != (n, n):
            raise ConfigurationError("mu, branching and decay dimensions differ")
        if not self.names:
            object.__setattr__(self, "names", tuple(f"p{i}" for i in range(n)))
        if len(self.names) != n:
            raise ConfigurationError("names length does not match dimension")
        if not self.observed:
            object.__setattr__(self, "observed", tuple(range(n)))

    @property
    def dimension(self):
        return len(self.mu)

    def index(self, name):
        try:
            return self.names.index(name)
        except ValueError:
            raise ConfigurationError(f"no process named {name!r}") from None


@dataclass(frozen=True)
class HawkesDiagnostics:
    spectral_radius: float
    diagonal_zero: bool
    nonnegative: bool
    subcritical: bool


def spectral_radius_power(g, tol=RADIUS_TOL, max_iter=64):
    """Spectral radius by norm growth under repeated matrix squaring
    (||G^m||^(1/m) -> radius as m = 2^k grows).  Unlike plain power
    iteration this handles nilpotent matrices (G^m hits zero exactly) and
    imprimitive ones (no oscillating norm ratios)."""
    m = np.asarray(g, dtype=float)
    log_scale = 0.0
    power = 1
    prev = None
    est = 0.0
    for _ in range(max_iter):
        norm = float(np.linalg.norm(m, 2))
        if norm == 0.0:
            return 0.0
        est = float(np.exp((np.log(norm) + log_scale) / power))
        if prev is not None and abs(est - prev) <= tol:
            return est
        prev = est
        m = (m / norm) @ (m / norm)
        log_scale = 2.0 * (log_scale + np.log(norm))
        power *= 2
    return est


def validate(model: HawkesModel) -> HawkesDiagnostics:
    """Check subcriticality (spectral radius < 1), zero diagonal and
    nonnegativity; raise listing every violated invariant."""
    g = model.branching
    radius = spectral_radius_power(g)
    diag = HawkesDiagnostics(
        spectral_radius=radius,
        diagonal_zero=bool(np.all(np.diag(g) == 0)),
        nonnegative=bool(np.all(g >= 0) and np.all(model.mu >= 0)),
        subcritical=radius < 1.0,
    )
    problems = []
    if not diag.nonnegative:
        problems.append("negative immigrant rate or branching entry")
    if not diag.diagonal_zero:
        problems.append("branching matrix diagonal is not zero "
                        "(apply normalize_branching first)")
    if np.any(model.decay <= 0):
        problems.append("kernel decay rates must be positive")
    if not diag.subcritical:
        problems.append(f"spectral radius {radius:.6g} >= 1")
    if problems:
        raise ConfigurationError("invalid model: " + "; ".join(problems))
    return diag


def normalize_branching(g):
    """Fold self-excitation into the off-diagonal entries: each j-event and
    its geometric chain of direct self-events jointly produce
    G_ij / (1 - G_jj) direct i-events.  Derived convenience, validated by
    cluster simulation."""
    g = np.asarray(g, dtype=float)
    selfex = np.diag(g)
    if np.any(selfex >= 1):
        raise ConfigurationError("self-excitation entries must be < 1")
    out = g / (1.0 - selfex[None, :])
    np.fill_diagonal(out, 0.0)
    return out


def expected_cluster_matrix(model: HawkesModel) -> np.ndarray:
    """R = (I - G)^{-1}: R[i, j] is the expected total number of i-events in
    a cluster rooted at one j-event.  Computed both by linear solve and by
    Neumann series; the two must agree to 1e-10."""
    diag = validate(model)
    g = model.branching
    n = model.dimension
    r_solve = np.linalg.solve(np.eye(n) - g, np.eye(n))
    term = np.eye(n)
    r_sum = np.eye(n)
    # tail after truncation is below ||G^k|| / (1 - radius)
    for _ in range(100_000):
        term = term @ g
        r_sum += term
        if float(np.max(np.abs(term))) <= 1e-13 * (1.0 - diag.spectral_radius):
            break
    if float(np.max(np.abs(r_solve - r_sum))) > SOLVER_AGREEMENT_TOL:
        raise EstimationError("cluster-matrix solvers disagree beyond 1e-10")
    return r_solve


def mean_intensities(model: HawkesModel) -> np.ndarray:
    """Stationary mean intensity vector (I - G)^{-1} mu."""
    return expected_cluster_matrix(model) @ model.mu


def decompose_effects(model: HawkesModel, source="A", mediator="M",
                      outcome="D") -> dict:
    """Direct, mediated and total expected outcome events per source event."""
    i_s, i_m, i_o = (model.index(x) for x in (source, mediator, outcome))
    if len({i_s, i_m, i_o}) != 3:
        raise ConfigurationError("source, mediator and outcome must differ")
    r = expected_cluster_matrix(model)
    g = model.branching
    return {
        "direct": float(g[i_o, i_s]),
        "mediated": float(g[i_o, i_m] * g[i_m, i_s]),
        "total": float(r[i_o, i_s]),
    }


# -- model builders -------------------------------------------------------------


def fig7_model(g_ma, g_da, g_dm, g_ml, g_dl, g_lu, g_du, mu, beta=1.0) -> HawkesModel:
    """Mediation topology: A -> M -> D with A -> D, a proxy L feeding M and
    D, and a latent U feeding L and D.  Observables are (A, M, D, L)."""
    mu = np.asarray(mu, dtype=float)
    if mu.shape != (5,):
        raise ConfigurationError("mu must have 5 entries (A, M, D, L, U)")
    a, m, d, l, u = range(5)
    g = np.zeros((5, 5))
    g[m, a] = g_ma
    g[d, a] = g_da
    g[d, m] = g_dm
    g[m, l] = g_ml
    g[d, l] = g_dl
    g[l, u] = g_lu
    g[d, u] = g_du
    beta = np.asarray(beta, dtype=float)
    if beta.ndim == 0:
        beta = np.full((5, 5), float(beta))
    return HawkesModel(mu, g, beta, names=FIG7_NAMES, observed=(a, m, d, l),
                       topology="fig7")


def random_fig7_model(seed, low=0.1, high=0.45) -> HawkesModel:
    rng = np.random.default_rng(seed)
    w = rng.uniform(low, high, size=7)
    mu = rng.uniform(0.2, 1.0, size=5)
    beta = rng.uniform(0.8, 2.0)
    return fig7_model(*w, mu=mu, beta=beta)


# -- simulation -------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class EventStream:
    times: np.ndarray
    procs: np.ndarray
    horizon: float
    n_processes: int
    roots: np.ndarray | None = None       # cluster root id per event
    generations: np.ndarray | None = None

    def __post_init__(self):
        if self.times.size and (self.times.min() < 0 or self.times.max() > self.horizon):
            raise DataError("event times outside [0, horizon]")
        if np.any(np.diff(self.times) < 0):
            raise DataError("event times not sorted")

    def __len__(self):
        return len(self.times)


def _spawn_children(model, t, j, horizon, rng):
    """Children of one type-j event at time t, per the cluster
    representation: counts are Poisson with the truncated kernel mass, and
    offsets follow the truncated exponential."""
    out = []
    rem = horizon - t
    for i in range(model.dimension):
        mass = model.branching[i, j]
        if mass <= 0:
            continue
        beta = model.decay[i, j]
        trunc = 1.0 - np.exp(-beta * rem)
        k = rng.poisson(mass * trunc)
        if k == 0:
            continue
        u = rng.uniform(size=k)
        offsets = -np.log1p(-u * trunc) / beta
        out.extend((t + dt, i) for dt in offsets)
    return out


def simulate(model: HawkesModel, t_end, seed) -> EventStream:
    """Cluster-representation sampler: immigrants are homogeneous Poisson,
    each event spawns Poisson numbers of children per target process."""
    validate(model)
    if t_end <= 0:
        raise ConfigurationError("t_end must be positive")
    expected = float(mean_intensities(model).sum() * t_end)
    if expected > EVENT_BUDGET:
        raise SizeError(f"expected {expected:.3g} events exceeds the "
                        f"{EVENT_BUDGET} budget")
    rng = np.random.default_rng(seed)
    times, procs, roots, gens = [], [], [], []
    root_id = 0
    for i in range(model.dimension):
        count = rng.poisson(model.mu[i] * t_end)
        for t in np.sort(rng.uniform(0.0, t_end, size=count)):
            stack = [(float(t), i, 0)]
            while stack:
                s, j, gen = stack.pop()
                times.append(s)
                procs.append(j)
                roots.append(root_id)
                gens.append(gen)
                if len(times) > EVENT_BUDGET:
                    raise SizeError("event budget exceeded during simulation")
                stack.extend((ct, ci, gen + 1)
                             for ct, ci in _spawn_children(model, s, j, t_end, rng))
            root_id += 1
    order = np.argsort(times, kind="stable")
    return EventStream(np.asarray(times)[order], np.asarray(procs, dtype=int)[order],
                       float(t_end), model.dimension,
                       np.asarray(roots, dtype=int)[order],
                       np.asarray(gens, dtype=int)[order])


def simulate_clusters(model: HawkesModel, root_type, n_clusters, horizon,
                      seed) -> np.ndarray:
    """Event counts by process over ``n_clusters`` independent clusters each
    rooted at one time-0 event of ``root_type`` (an injected event; its
    cluster is distributed like an intrinsic one)."""
    validate(model)
    j0 = model.index(root_type) if isinstance(root_type, str) else int(root_type)
    rng = np.random.default_rng(seed)
    counts = np.zeros((n_clusters, model.dimension), dtype=int)
    for k in range(n_clusters):
        stack = [(0.0, j0)]
        while stack:
            t, j = stack.pop()
            counts[k, j] += 1
            stack.extend(_spawn_children(model, t, j, horizon, rng))
    return counts


# -- integrated covariance ----------------------------------------------------------


@dataclass(frozen=True, eq=False)
class CovMatrix:
    matrix: np.ndarray
    names: tuple[str, ...] = ()

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=float)
        object.__setattr__(self, "matrix", m)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise DataError("covariance matrix must be square")
        if float(np.max(np.abs(m - m.T))) > 1e-10 * max(1.0, float(np.max(np.abs(m)))):
            raise DataError("covariance matrix is not symmetric")
        if np.any(np.diag(m) <= 0):
            raise DataError("covariance diagonal must be positive")
        if not self.names:
            object.__setattr__(self, "names",
                               tuple(f"p{i}" for i in range(m.shape[0])))

    def entry(self, a, b):
        return float(self.matrix[self.names.index(a), self.names.index(b)])


def integrated_cov_exact(model: HawkesModel) -> CovMatrix:
    """Exact integrated covariance of the observed processes:
    the full-process matrix R diag(Lambda) R^T restricted to the observed
    block.  For the mediation topology the marginalized quadratic form is
    verified to have the asserted sparsity (only the D-L latent coupling
    survives off the diagonal)."""
    r = expected_cluster_matrix(model)
    lam = r @ model.mu
    if np.any(lam <= 0):
        raise ConfigurationError("mean intensities must be positive")
    c_full = r @ np.diag(lam) @ r.T
    obs = list(model.observed)
    c_obs = c_full[np.ix_(obs, obs)]
    if model.topology == "fig7":
        _check_theta_structure(model, c_obs)
    return CovMatrix(0.5 * (c_obs + c_obs.T),
                     tuple(model.names[i] for i in obs))


def _check_theta_structure(model, c_obs, tol=1e-8):
    obs = list(model.observed)
    g_oo = model.branching[np.ix_(obs, obs)]
    r_o = np.linalg.solve(np.eye(len(obs)) - g_oo, np.eye(len(obs)))
    theta = np.linalg.solve(r_o, np.linalg.solve(r_o, c_obs.T).T)
    scale = float(np.max(np.abs(theta)))
    d, l = 2, 3
    for i in range(len(obs)):
        for j in range(len(obs)):
            if i == j or {i, j} == {d, l}:
                continue
            if abs(theta[i, j]) > tol * scale:
                raise IdentificationError(
                    f"latent quadratic form has unexpected entry "
                    f"({model.names[obs[i]]}, {model.names[obs[j]]}) = "
                    f"{theta[i, j]:.3g}")


def default_max_lag(model: HawkesModel, bin_width, tail=1e-3):
    """Lag horizon so that every kernel's tail mass beyond it is < tail."""
    used = model.decay[model.branching > 0]
    beta_min = float(used.min()) if used.size else 1.0
    return int(np.ceil(-np.log(tail) / (beta_min * bin_width)))


def integrated_cov_empirical(stream: EventStream, bin_width=0.2,
                             max_lag=50) -> CovMatrix:
    """Binned estimator: sample cross-covariances of bin counts summed over
    lags -max_lag..max_lag, scaled by 1/bin_width."""
    if bin_width <= 0:
        raise ConfigurationError("bin_width must be positive")
    n_bins = int(stream.horizon / bin_width)
    if n_bins < 100:
        raise DataError(f"only {n_bins} bins; need at least 100")
    n = stream.n_processes
    counts = np.zeros((n_bins, n))
    idx = np.minimum((stream.times / bin_width).astype(int), n_bins - 1)
    np.add.at(counts, (idx, stream.procs), 1.0)
    x = counts - counts.mean(axis=0)
    c = x.T @ x / n_bins
    for lag in range(1, max_lag + 1):
        cl = x[:-lag].T @ x[lag:] / (n_bins - lag)
        c += cl + cl.T
    c /= bin_width
    return CovMatrix(0.5 * (c + c.T))


# -- identification ------------------------------------------------------------------


@dataclass(frozen=True)
class IdentificationResult:
    g_ma: float
    g_da: float
    g_dm: float
    r_ma: float
    r_da: float
    r_dm: float
    r_ml: float
    theta_aa: float
    theta_ll: float
    theta_mm: float
    direct: float
    mediated: float

    def as_dict(self):
        return dataclasses.asdict(self)


def identify(c_obs: CovMatrix, structure_rtol=1e-6) -> IdentificationResult:
    """Moment-based identification from the observable integrated covariance
    (processes ordered A, M, D, L).

    Sequential solve: the A-variance gives the exposure innovation; the
    M-A and D-A covariances give the cluster responses R_MA, R_DA; the
    L-block gives the proxy innovation and R_ML; the M-variance gives the
    mediator innovation; and the D-M covariance, after substituting the D-L
    covariance to absorb the latent confounding, gives R_DM.  Inverting the
    unit-triangular response over (A, M, D) yields the branching entries.
    """
    c = c_obs.matrix
    if c.shape != (4, 4):
        raise DataError("need the 4x4 observable covariance (A, M, D, L)")
    a, m, d, l = 0, 1, 2, 3
    scale_al = np.sqrt(c[a, a] * c[l, l])
    if abs(c[a, l]) > structure_rtol * scale_al:
        raise IdentificationError(
            "C_AL is nonzero beyond tolerance: the exposure and the proxy "
            "must be uncorrelated under this topology")
    theta_aa = c[a, a]
    theta_ll = c[l, l]
    if theta_aa <= 0 or theta_ll <= 0:
        raise IdentificationError("nonpositive solved innovation variance")
    r_ma = c[m, a] / theta_aa
    r_da = c[d, a] / theta_aa
    r_ml = c[l, m] / theta_ll
    theta_mm = c[m, m] - r_ma ** 2 * theta_aa - r_ml ** 2 * theta_ll
    if theta_mm <= 0:
        raise IdentificationError(
            f"solved mediator innovation variance {theta_mm:.3g} <= 0")
    # the D-L covariance equals R_DL*theta_LL + theta_DL, exactly the latent
    # contribution entering C_DM through the R_ML channel
    r_dm = (c[d, m] - r_da * theta_aa * r_ma - r_ml * c[d, l]) / theta_mm
    # invert the unit-lower-triangular response over (A, M, D)
    g_ma = r_ma
    g_dm = r_dm
    g_da = r_da - r_dm * r_ma
    return IdentificationResult(
        g_ma=float(g_ma), g_da=float(g_da), g_dm=float(g_dm),
        r_ma=float(r_ma), r_da=float(r_da), r_dm=float(r_dm),
        r_ml=float(r_ml), theta_aa=float(theta_aa), theta_ll=float(theta_ll),
        theta_mm=float(theta_mm),
        direct=float(g_da), mediated=float(g_dm * g_ma))


# -- serialization ---------------------------------------------------------------------


def model_to_dict(model: HawkesModel) -> dict:
    return {
        "mu": model.mu.tolist(),
        "branching": model.branching.tolist(),
        "decay": model.decay.tolist(),
        "names": list(model.names),
        "observed": list(model.observed),
        "topology": model.topology,
    }


def model_from_dict(d: dict) -> HawkesModel:
    try:
        return HawkesModel(
            np.asarray(d["mu"], dtype=float),
            np.asarray(d["branching"], dtype=float),
            np.asarray(d["decay"], dtype=float),
            names=tuple(d.get("names", ())),
            observed=tuple(d.get("observed", ())),
            topology=d.get("topology"),
        )
    except KeyError as exc:
        raise ConfigurationError(f"model file missing field {exc}") from exc
