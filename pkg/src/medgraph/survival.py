"""Survival estimation stack for the additive-treatment hazard model
lambda(t) = rho_t * a + psi(t) * exp(gamma . z_t).

Data live in counting-process format: one row per (subject, interval), with
covariates held constant within an interval.  The stack provides
Kaplan-Meier and Nelson-Aalen estimators, time-dependent-covariate Cox
fitting with Breslow ties, the Breslow baseline, the cumulative treatment
hazard estimator R(t), the direct/indirect relative survival curves, and a
subject-level bootstrap.  A piecewise-constant simulation generator acts as
the oracle for estimator tests.
"""

from __future__ import annotations

import csv
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError, DataError, EstimationError

GRAD_TOL = 1e-8
STEP_FLOOR = 1e-10
MAX_ITER = 60


# -- step functions -----------------------------------------------------------


@dataclass(frozen=True, eq=False)
class StepFunction:
    """Right-continuous step function: value ``initial`` before the first
    jump time, ``values[i]`` on [times[i], times[i+1])."""

    times: np.ndarray
    values: np.ndarray
    initial: float = 0.0

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float)
        values = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "values", values)
        if times.shape != values.shape or times.ndim != 1:
            raise ConfigurationError("times and values must be 1-d arrays of equal length")
        if times.size and np.any(np.diff(times) <= 0):
            raise ConfigurationError("jump times must be strictly increasing")
        if not (np.all(np.isfinite(times)) and np.all(np.isfinite(values))):
            raise ConfigurationError("step function must be finite")

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        if self.times.size == 0:
            out = np.full_like(t, self.initial)
        else:
            idx = np.searchsorted(self.times, t, side="right")
            out = np.where(idx == 0, self.initial,
                           self.values[np.maximum(idx - 1, 0)])
        return float(out) if out.ndim == 0 else out


# -- datasets ------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class SurvivalDataset:
    """Counting-process dataset.  Rows are grouped by subject and sorted by
    interval start within each subject."""

    subject: np.ndarray
    start: np.ndarray
    stop: np.ndarray
    event: np.ndarray
    treatment: np.ndarray
    covariates: np.ndarray
    covariate_names: tuple[str, ...]

    @classmethod
    def build(cls, subject, start, stop, event, treatment, covariates,
              covariate_names):
        subject = np.asarray(subject, dtype=object)
        start = np.asarray(start, dtype=float)
        stop = np.asarray(stop, dtype=float)
        event = np.asarray(event, dtype=int)
        treatment = np.asarray(treatment, dtype=int)
        covariates = np.asarray(covariates, dtype=float)
        if covariates.ndim == 1:
            covariates = covariates[:, None]
        n = len(subject)
        if not (len(start) == len(stop) == len(event) == len(treatment)
                == len(covariates) == n):
            raise DataError("column lengths differ")
        if n == 0:
            raise DataError("empty dataset")
        if covariates.shape[1] != len(covariate_names):
            raise DataError("covariate name count does not match columns")
        if np.any(start >= stop):
            bad = int(np.argmax(start >= stop))
            raise DataError(f"interval_start >= interval_stop for subject "
                            f"{subject[bad]!r}")
        if not set(np.unique(event)) <= {0, 1}:
            raise DataError("event must be 0 or 1")
        if not set(np.unique(treatment)) <= {0, 1}:
            raise DataError("treatment must be 0 or 1")

        # stable sort: subjects keep first-appearance order, intervals by start
        first_seen: dict = {}
        for s in subject:
            first_seen.setdefault(s, len(first_seen))
        order = np.lexsort((start, np.array([first_seen[s] for s in subject])))
        subject, start, stop = subject[order], start[order], stop[order]
        event, treatment = event[order], treatment[order]
        covariates = covariates[order]

        for i in range(1, n):
            if subject[i] != subject[i - 1]:
                continue
            if start[i] < stop[i - 1]:
                raise DataError(f"overlapping intervals for subject {subject[i]!r}")
            if event[i - 1] == 1:
                raise DataError(f"event interval is not last for subject {subject[i]!r}")
            if treatment[i] != treatment[i - 1]:
                raise DataError(f"treatment changes within subject {subject[i]!r}")
        return cls(subject, start, stop, event, treatment, covariates,
                   tuple(covariate_names))

    def __len__(self):
        return len(self.subject)

    @property
    def subjects(self):
        seen: dict = {}
        for s in self.subject:
            seen.setdefault(s, None)
        return list(seen)

    @property
    def n_subjects(self):
        return len(set(self.subject))

    @property
    def n_events(self):
        return int(self.event.sum())

    def restrict(self, mask) -> "SurvivalDataset":
        mask = np.asarray(mask, dtype=bool)
        if not mask.any():
            raise DataError("restriction selects no rows")
        return SurvivalDataset(self.subject[mask], self.start[mask],
                               self.stop[mask], self.event[mask],
                               self.treatment[mask], self.covariates[mask],
                               self.covariate_names)

    def group(self, a) -> "SurvivalDataset":
        return self.restrict(self.treatment == a)

    def column(self, name):
        try:
            j = self.covariate_names.index(name)
        except ValueError:
            raise ConfigurationError(f"no covariate column named {name!r}") from None
        return self.covariates[:, j]

    def summary(self) -> dict:
        subj_treat = {s: int(a) for s, a in zip(self.subject, self.treatment)}
        subj_event: dict = {}
        for s, e in zip(self.subject, self.event):
            subj_event[s] = subj_event.get(s, 0) | int(e)
        by_group = {0: 0, 1: 0}
        deaths = {0: 0, 1: 0}
        for s, a in subj_treat.items():
            by_group[a] += 1
            deaths[a] += subj_event[s]
        return {
            "subjects": len(subj_treat),
            "events": sum(subj_event.values()),
            "subjects_by_treatment": by_group,
            "events_by_treatment": deaths,
            "rows": len(self),
        }


def ingest_csv(path, columns) -> SurvivalDataset:
    """Load a counting-process CSV.

    ``columns`` maps the roles {'id', 'start', 'stop', 'event', 'treatment'}
    to header names and 'covariates' to a list of numeric columns.  Cell
    errors are reported with the 1-based data row number.
    """
    required = ("id", "start", "stop", "event", "treatment")
    missing = [k for k in required if k not in columns]
    if missing:
        raise ConfigurationError(f"column map missing roles: {missing}")
    cov_cols = list(columns.get("covariates", []))
    rows = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise DataError("empty file: no header row")
        needed = [columns[k] for k in required] + cov_cols
        absent = [c for c in needed if c not in reader.fieldnames]
        if absent:
            raise DataError(f"missing columns: {absent}")
        for rownum, rec in enumerate(reader, start=1):
            try:
                rows.append((
                    rec[columns["id"]],
                    float(rec[columns["start"]]),
                    float(rec[columns["stop"]]),
                    int(rec[columns["event"]]),
                    int(rec[columns["treatment"]]),
                    [float(rec[c]) for c in cov_cols],
                ))
            except (TypeError, ValueError) as exc:
                raise DataError(f"row {rownum}: non-numeric cell ({exc})") from exc
    if not rows:
        raise DataError("empty dataset: no data rows")
    subject, start, stop, event, treatment, covs = zip(*rows)
    return SurvivalDataset.build(subject, start, stop, event, treatment,
                                 np.array(covs, dtype=float).reshape(len(rows), -1),
                                 tuple(cov_cols))


# -- mediator summaries --------------------------------------------------------


def prothrombin_transform(values):
    """Clinical transform: values at or above 70 become 0, lower values are
    shifted by -70 (so the covariate measures the shortfall)."""
    values = np.asarray(values, dtype=float)
    return np.where(values >= 70.0, 0.0, values - 70.0)


def mediator_summary(dataset: SurvivalDataset, mediator_col, scheme,
                     decay=None, split=None) -> SurvivalDataset:
    """Append derived mediator-history covariates, recomputed at each
    interval start.

    Schemes: 'last' (current value), 'mean_all' (running mean),
    'weighted' (exponentially decaying weights, most recent first; needs
    ``decay`` in (0, 1]), 'two_part' (means before/after ``split``; an empty
    part borrows the other part's mean).
    """
    raw = dataset.column(mediator_col)
    n = len(dataset)
    if scheme == "weighted":
        if decay is None or not 0 < decay <= 1:
            raise ConfigurationError("'weighted' needs a decay factor in (0, 1]")
    if scheme == "two_part" and split is None:
        raise ConfigurationError("'two_part' needs a split time")

    out_cols = {"last": 1, "mean_all": 1, "weighted": 1, "two_part": 2}
    if scheme not in out_cols:
        raise ConfigurationError(f"unknown summary scheme {scheme!r}")
    derived = np.zeros((n, out_cols[scheme]))

    # dataset rows are sorted by subject, then start
    i = 0
    while i < n:
        j = i
        while j < n and dataset.subject[j] == dataset.subject[i]:
            j += 1
        vals = raw[i:j]
        starts = dataset.start[i:j]
        for k in range(j - i):
            hist = vals[:k + 1]
            if scheme == "last":
                derived[i + k, 0] = hist[-1]
            elif scheme == "mean_all":
                derived[i + k, 0] = hist.mean()
            elif scheme == "weighted":
                w = decay ** np.arange(len(hist))[::-1]
                derived[i + k, 0] = float(np.dot(w, hist) / w.sum())
            else:
                early = hist[starts[:k + 1] < split]
                late = hist[starts[:k + 1] >= split]
                e = early.mean() if early.size else (late.mean() if late.size else 0.0)
                l = late.mean() if late.size else e
                derived[i + k] = (e, l)
        i = j

    names = {1: (f"{mediator_col}_{scheme}",),
             2: (f"{mediator_col}_{scheme}_early", f"{mediator_col}_{scheme}_late")}
    return SurvivalDataset(
        dataset.subject, dataset.start, dataset.stop, dataset.event,
        dataset.treatment, np.hstack([dataset.covariates, derived]),
        dataset.covariate_names + names[out_cols[scheme]])


# -- risk-set machinery ---------------------------------------------------------


def _risk_prefix(grid, start, stop, weights):
    """Sum of ``weights`` over rows at risk at each grid time (a row covers
    grid time u when start < u <= stop).  O((n + g) log g)."""
    lo = np.searchsorted(grid, start, side="right")
    hi = np.searchsorted(grid, stop, side="right")
    # extended precision: the +w/-w cumulative sum cancels catastrophically
    # at late times otherwise, putting a ~1e-6 floor under the Cox gradient
    diff = np.zeros(len(grid) + 1, dtype=np.longdouble)
    np.add.at(diff, lo, weights)
    np.subtract.at(diff, hi, weights)
    return np.cumsum(diff)[:len(grid)].astype(float)


def _event_counts(grid, dataset):
    mask = dataset.event == 1
    idx = np.searchsorted(grid, dataset.stop[mask])
    return np.bincount(idx, minlength=len(grid)).astype(float)


# -- nonparametric estimators ----------------------------------------------------


def nelson_aalen(dataset: SurvivalDataset) -> StepFunction:
    """Cumulative-hazard estimator: jumps d/Y at event times."""
    ev = np.unique(dataset.stop[dataset.event == 1])
    if ev.size == 0:
        return StepFunction(np.array([]), np.array([]), 0.0)
    d = _event_counts(ev, dataset)
    y = _risk_prefix(ev, dataset.start, dataset.stop, np.ones(len(dataset)))
    return StepFunction(ev, np.cumsum(d / y), 0.0)


def kaplan_meier(dataset: SurvivalDataset) -> StepFunction:
    """Product-limit survival estimator; starts at 1."""
    ev = np.unique(dataset.stop[dataset.event == 1])
    if ev.size == 0:
        return StepFunction(np.array([]), np.array([]), 1.0)
    d = _event_counts(ev, dataset)
    y = _risk_prefix(ev, dataset.start, dataset.stop, np.ones(len(dataset)))
    return StepFunction(ev, np.cumprod(1.0 - d / y), 1.0)


# -- Cox model with time-dependent covariates -------------------------------------


@dataclass(frozen=True, eq=False)
class CoxFit:
    coef: np.ndarray
    loglik: float
    iterations: int
    grad_norm: float
    information: np.ndarray
    converged: bool = True


def _cox_stats(dataset, ev, d, z_events_sum, gamma):
    z = dataset.covariates
    w = np.exp(z @ gamma)
    p = z.shape[1]
    s0 = _risk_prefix(ev, dataset.start, dataset.stop, w)
    if np.any(s0[d > 0] <= 0):
        raise DataError("empty risk set at an event time")
    s1 = np.stack([_risk_prefix(ev, dataset.start, dataset.stop, w * z[:, j])
                   for j in range(p)], axis=1)
    s2 = np.zeros((len(ev), p, p))
    for j in range(p):
        for k in range(j, p):
            col = _risk_prefix(ev, dataset.start, dataset.stop,
                               w * z[:, j] * z[:, k])
            s2[:, j, k] = col
            s2[:, k, j] = col
    mean = s1 / s0[:, None]
    loglik = float(z_events_sum @ gamma - np.sum(d * np.log(s0)))
    grad = z_events_sum - d @ mean
    info = np.einsum("t,tjk->jk", d, s2 / s0[:, None, None]) \
        - np.einsum("t,tj,tk->jk", d, mean, mean)
    return loglik, grad, info


def log_partial_likelihood(dataset: SurvivalDataset, gamma) -> float:
    """Breslow-ties log partial likelihood at ``gamma`` (used for
    finite-difference checks of the analytic score)."""
    gamma = np.asarray(gamma, dtype=float)
    ev = np.unique(dataset.stop[dataset.event == 1])
    d = _event_counts(ev, dataset)
    zs = dataset.covariates[dataset.event == 1].sum(axis=0)
    return _cox_stats(dataset, ev, d, zs, gamma)[0]


def fit_cox_td(dataset: SurvivalDataset, tol=GRAD_TOL,
               max_iter=MAX_ITER) -> CoxFit:
    """Damped-Newton fit of the time-dependent-covariate Cox model."""
    if dataset.n_events == 0:
        raise EstimationError("no events: the partial likelihood is empty")
    ev = np.unique(dataset.stop[dataset.event == 1])
    d = _event_counts(ev, dataset)
    zs = dataset.covariates[dataset.event == 1].sum(axis=0)
    p = dataset.covariates.shape[1]
    gamma = np.zeros(p)
    loglik, grad, info = _cox_stats(dataset, ev, d, zs, gamma)
    for it in range(1, max_iter + 1):
        gnorm = float(np.max(np.abs(grad)))
        if gnorm <= tol:
            return CoxFit(gamma, loglik, it - 1, gnorm, info)
        try:
            step = np.linalg.solve(info, grad)
        except np.linalg.LinAlgError:
            raise EstimationError(
                "singular information matrix (collinear design?)") from None
        t = 1.0
        # monotonicity slack at float64 resolution; without it the line
        # search rejects the final full Newton step near the optimum and the
        # gradient stalls above tolerance
        slack = 1e-12 * (1.0 + abs(loglik))
        while True:
            cand = gamma + t * step
            cand_ll, cand_grad, cand_info = _cox_stats(dataset, ev, d, zs, cand)
            if cand_ll >= loglik - slack:
                gamma, loglik, grad, info = cand, cand_ll, cand_grad, cand_info
                break
            t *= 0.5
            if t < STEP_FLOOR:
                raise EstimationError(
                    f"step halving floor reached at iteration {it} "
                    f"(gradient norm {gnorm:.3e}; monotone likelihood?)")
    raise EstimationError(
        f"Newton iteration did not converge in {max_iter} steps "
        f"(gradient norm {float(np.max(np.abs(grad))):.3e})")


def breslow_baseline(fit: CoxFit, dataset: SurvivalDataset) -> StepFunction:
    """Cumulative baseline hazard: jumps d / sum(Y exp(gamma z)) at event
    times of the supplied (treatment a=0) data."""
    ev = np.unique(dataset.stop[dataset.event == 1])
    if ev.size == 0:
        return StepFunction(np.array([]), np.array([]), 0.0)
    d = _event_counts(ev, dataset)
    w = np.exp(dataset.covariates @ fit.coef)
    s0 = _risk_prefix(ev, dataset.start, dataset.stop, w)
    if np.any(s0[d > 0] <= 0):
        raise DataError("empty risk set at an event time")
    return StepFunction(ev, np.cumsum(d / s0), 0.0)


# -- treatment hazard estimator ----------------------------------------------------


def estimate_rho(dataset: SurvivalDataset, fit: CoxFit) -> StepFunction:
    """Cumulative additive treatment hazard R(t).

    R(t) is the Nelson-Aalen estimate of group a=1 minus an integral over
    group a=0 event times whose integrand is the group-1 risk-weighted
    exp(gamma z) sum divided by the product of the group-1 risk count and
    the group-0 risk-weighted exp(gamma z) sum.  The estimate truncates with
    a warning when a needed risk set is empty, and warns if the final value
    is negative (labeling mismatch or noise).
    """
    if not np.any(dataset.treatment == 1):
        raise EstimationError("group a=1 is empty")
    if not np.any(dataset.treatment == 0):
        raise EstimationError("group a=0 is empty")
    g1 = dataset.group(1)
    g0 = dataset.group(0)
    grid = np.unique(np.concatenate([
        g1.stop[g1.event == 1], g0.stop[g0.event == 1]]))
    if grid.size == 0:
        return StepFunction(np.array([]), np.array([]), 0.0)
    d1 = _event_counts(grid, g1)
    d0 = _event_counts(grid, g0)
    y1 = _risk_prefix(grid, g1.start, g1.stop, np.ones(len(g1)))
    e1 = _risk_prefix(grid, g1.start, g1.stop, np.exp(g1.covariates @ fit.coef))
    e0 = _risk_prefix(grid, g0.start, g0.stop, np.exp(g0.covariates @ fit.coef))

    needed = (d1 > 0) | (d0 > 0)
    usable = np.ones(len(grid), dtype=bool)
    usable[(d1 > 0) & (y1 <= 0)] = False
    usable[(d0 > 0) & ((y1 <= 0) | (e0 <= 0))] = False
    cut = len(grid)
    bad = np.nonzero(needed & ~usable)[0]
    if bad.size:
        cut = int(bad[0])
        warnings.warn(f"empty risk set at t={grid[cut]:g}; "
                      "truncating the cumulative treatment hazard there")
    grid = grid[:cut]
    if grid.size == 0:
        return StepFunction(np.array([]), np.array([]), 0.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        inc = np.where(d1[:cut] > 0, d1[:cut] / y1[:cut], 0.0)
        inc -= np.where(d0[:cut] > 0,
                        d0[:cut] * e1[:cut] / (y1[:cut] * e0[:cut]), 0.0)
    values = np.cumsum(inc)
    if values[-1] < 0:
        warnings.warn("cumulative treatment hazard is negative at the last "
                      "event time; check the group labeling (a=0 should be "
                      "the lower-hazard group) or treat as noise")
    return StepFunction(grid, values, 0.0)


# -- effect curves -------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class EffectCurves:
    """Relative-survival direct/indirect effect curves on a common grid."""

    times: np.ndarray
    sde: np.ndarray
    sie: np.ndarray
    total: np.ndarray
    bands: dict = field(default_factory=dict)

    def __post_init__(self):
        if np.any(np.abs(self.sde * self.sie - self.total) > 1e-10):
            raise EstimationError("SDE * SIE != total on the output grid")


def effect_curves(rho_hat: StepFunction, km_a: StepFunction,
                  km_astar: StepFunction, a=1, a_star=0) -> EffectCurves:
    """SDE(t) = exp((a*-a) R(t)); total(t) = KM_a(t)/KM_a*(t);
    SIE = total / SDE.  The grid is the union of all input jump times,
    truncated where the reference survival hits zero."""
    grid = np.unique(np.concatenate([rho_hat.times, km_a.times, km_astar.times]))
    if grid.size == 0:
        raise EstimationError("no jump times: nothing to evaluate")
    s_ref = km_astar(grid)
    zero = np.nonzero(s_ref <= 0)[0]
    if zero.size:
        grid = grid[:int(zero[0])]
        s_ref = s_ref[:int(zero[0])]
        if grid.size == 0:
            raise EstimationError("reference survival is zero from the start")
    sde = np.exp((a_star - a) * rho_hat(grid))
    total = km_a(grid) / s_ref
    sie = total / sde
    return EffectCurves(grid, sde, sie, total)


# -- bootstrap ------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class BootstrapBands:
    grid: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    n_boot: int
    n_dropped: int
    replicates: np.ndarray | None = None


def resample_subjects(dataset: SurvivalDataset, rng) -> SurvivalDataset:
    """Draw subjects with replacement; copies of a subject get fresh ids."""
    ids = dataset.subjects
    picks = rng.integers(0, len(ids), size=len(ids))
    # rows are grouped by subject, so one linear scan finds every block
    row_index = {}
    lo = 0
    for i in range(1, len(dataset) + 1):
        if i == len(dataset) or dataset.subject[i] != dataset.subject[lo]:
            row_index[dataset.subject[lo]] = np.arange(lo, i)
            lo = i
    rows = []
    new_ids = []
    for k, pick in enumerate(picks):
        idx = row_index[ids[pick]]
        rows.append(idx)
        new_ids.extend([f"b{k}"] * len(idx))
    rows = np.concatenate(rows)
    return SurvivalDataset(
        np.array(new_ids, dtype=object), dataset.start[rows],
        dataset.stop[rows], dataset.event[rows], dataset.treatment[rows],
        dataset.covariates[rows], dataset.covariate_names)


def bootstrap(dataset: SurvivalDataset, statistic, n_boot, seed, grid=None,
              keep_replicates=False) -> BootstrapBands:
    """Pointwise 2.5/97.5 percentile bands for ``statistic`` (a callable
    dataset -> StepFunction) under subject resampling.

    Each replicate uses an independent stream derived from (seed, replicate)
    so results do not depend on execution order.  Failing replicates are
    dropped; more than 20% drops is an error.
    """
    if n_boot < 2:
        raise ConfigurationError("need at least 2 bootstrap replicates")
    if grid is None:
        grid = np.unique(dataset.stop[dataset.event == 1])
    grid = np.asarray(grid, dtype=float)
    rows = []
    dropped = 0
    for rep in range(n_boot):
        rng = np.random.default_rng([int(seed), rep])
        try:
            fn = statistic(resample_subjects(dataset, rng))
            rows.append(fn(grid))
        except (EstimationError, DataError):
            dropped += 1
    if dropped > 0.2 * n_boot:
        raise EstimationError(
            f"{dropped}/{n_boot} bootstrap replicates failed")
    sample = np.vstack(rows)
    return BootstrapBands(
        grid,
        np.percentile(sample, 2.5, axis=0),
        np.percentile(sample, 97.5, axis=0),
        n_boot, dropped,
        sample if keep_replicates else None)


# -- simulation oracle ------------------------------------------------------------------


@dataclass(frozen=True)
class SimulationConfig:
    """Generator for lambda(t) = rho*a + psi(t) exp(gamma * m_t) with a
    piecewise-constant baseline and a mediator re-measured at visit times."""

    n_subjects: int
    rho: float
    gamma: float
    psi_times: tuple[float, ...] = (0.0,)
    psi_values: tuple[float, ...] = (0.5,)
    visit_times: tuple[float, ...] = ()
    horizon: float = 5.0
    mediator_base: float = 0.0
    mediator_treatment_shift: float = 0.0
    mediator_sd: float = 1.0
    treated_fraction: float = 0.5

    def __post_init__(self):
        if len(self.psi_times) != len(self.psi_values) or self.psi_times[0] != 0.0:
            raise ConfigurationError("psi breakpoints must start at 0 and "
                                     "match the value list")
        if self.horizon <= 0:
            raise ConfigurationError("horizon must be positive")


def simulate_dataset(config: SimulationConfig, seed) -> SurvivalDataset:
    """Draw event times by inversion of the piecewise-constant hazard;
    intervals split at baseline breakpoints and mediator visits."""
    rng = np.random.default_rng(seed)
    psi = StepFunction(np.asarray(config.psi_times),
                       np.asarray(config.psi_values),
                       config.psi_values[0])
    visits = sorted(v for v in config.visit_times if 0 < v < config.horizon)
    knots = sorted({0.0, config.horizon}
                   | {t for t in config.psi_times if 0 < t < config.horizon}
                   | set(visits))
    n_treated = int(round(config.n_subjects * config.treated_fraction))

    cols = {"subject": [], "start": [], "stop": [], "event": [],
            "treatment": [], "m": []}
    for i in range(config.n_subjects):
        a = 1 if i < n_treated else 0
        m = config.mediator_base + config.mediator_treatment_shift * a \
            + config.mediator_sd * rng.standard_normal()
        target = rng.exponential()
        acc = 0.0
        for lo, hi in zip(knots[:-1], knots[1:]):
            if lo in visits:
                m = config.mediator_base + config.mediator_treatment_shift * a \
                    + config.mediator_sd * rng.standard_normal()
            lam = config.rho * a + psi(lo) * np.exp(config.gamma * m)
            if lam < 0:
                raise ConfigurationError(
                    f"negative hazard {lam:g} at t={lo:g}; adjust parameters")
            seg = lam * (hi - lo)
            death = acc + seg >= target and lam > 0
            stop = lo + (target - acc) / lam if death else hi
            cols["subject"].append(f"s{i}")
            cols["start"].append(lo)
            cols["stop"].append(stop)
            cols["event"].append(1 if death else 0)
            cols["treatment"].append(a)
            cols["m"].append(m)
            if death:
                break
            acc += seg
    return SurvivalDataset.build(cols["subject"], cols["start"], cols["stop"],
                                 cols["event"], cols["treatment"],
                                 np.array(cols["m"]), ("m",))


# -- full pipeline -----------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class EstimationResult:
    fit: CoxFit
    baseline: StepFunction
    rho_hat: StepFunction
    curves: EffectCurves
    km: dict


def estimate_effects(dataset: SurvivalDataset, a=1, a_star=0) -> EstimationResult:
    """Fit the Cox model on the reference group, estimate the cumulative
    treatment hazard, and assemble the effect curves."""
    ref = dataset.group(a_star)
    fit = fit_cox_td(ref)
    baseline = breslow_baseline(fit, ref)
    rho_hat = estimate_rho(dataset, fit)
    km = {g: kaplan_meier(dataset.group(g)) for g in (0, 1)}
    curves = effect_curves(rho_hat, km[a], km[a_star], a, a_star)
    return EstimationResult(fit, baseline, rho_hat, curves, km)
