"""Exact discrete structural causal models on a short time grid.

Variables live in a fixed temporal order (treatment, then alternating
mediator / covariate / survival-indicator blocks); each carries a conditional
probability table over its parents.  All inference is by exhaustive
summation on the full joint table, so models must stay small.  The module
provides do-interventions, the mediational g-formula and g-computation by
direct summation, and exact conditional-independence testing (Granger
non-causality on lagged variables, and the three mediation assumptions).
"""

from __future__ import annotations

import dataclasses
import itertools
from dataclasses import dataclass

import numpy as np

from .errors import (ConfigurationError, QueryError, SizeError,
                     UndefinedConditionalError)
from .graphs import UnrolledDag, lagged_name

NA = "NA"
CELL_BUDGET = 1 << 22
MIN_CELL_PROB = 1e-3
CPT_ROW_TOL = 1e-12
CI_TOL = 1e-12

TREATMENT = "A"
TREATMENT_DIRECT = "AD"
TREATMENT_MEDIATED = "AM"

VIOLATIONS = ("direct_to_mediator", "mediated_to_survival",
              "mediated_to_covariate", "latent_confounding")


def mediator_name(i):
    return f"M{i}"


def covariate_name(i):
    return f"C{i}"


def survival_name(i):
    return f"S{i}"


@dataclass(frozen=True, eq=False)
class Variable:
    """One model variable: finite state space, parents, CPT.

    The CPT has one axis per parent (in parent order) plus a final axis over
    the variable's own states; every row sums to 1.
    """

    name: str
    states: tuple
    parents: tuple[str, ...]
    cpt: np.ndarray

    def __post_init__(self):
        cpt = np.asarray(self.cpt, dtype=float)
        object.__setattr__(self, "cpt", cpt)
        if cpt.shape[-1] != len(self.states):
            raise ConfigurationError(
                f"{self.name}: CPT last axis {cpt.shape[-1]} != {len(self.states)} states")
        if cpt.ndim != len(self.parents) + 1:
            raise ConfigurationError(
                f"{self.name}: CPT has {cpt.ndim} axes for {len(self.parents)} parents")
        if np.any(cpt < 0):
            raise ConfigurationError(f"{self.name}: negative CPT entries")
        rows = cpt.sum(axis=-1)
        if np.any(np.abs(rows - 1.0) > CPT_ROW_TOL):
            raise ConfigurationError(f"{self.name}: CPT rows do not sum to 1")

    def state_index(self, value):
        try:
            return self.states.index(value)
        except ValueError:
            raise ConfigurationError(
                f"value {value!r} not in state space of {self.name}: {self.states}") from None


@dataclass(frozen=True, eq=False)
class DiscreteScm:
    """Structural causal model over finitely many discrete variables.

    ``grid`` is the number of time-grid points (0 for purely atemporal toy
    models).  Variables are listed in temporal order and may only have
    earlier variables as parents.
    """

    variables: tuple[Variable, ...]
    grid: int = 0

    def __post_init__(self):
        object.__setattr__(self, "variables", tuple(self.variables))
        if self.grid < 0:
            raise ConfigurationError(f"grid must be >= 0, got {self.grid}")
        seen = {}
        for pos, v in enumerate(self.variables):
            if v.name in seen:
                raise ConfigurationError(f"duplicate variable name {v.name!r}")
            for p, size in zip(v.parents, v.cpt.shape[:-1]):
                if p not in seen:
                    raise ConfigurationError(
                        f"{v.name}: parent {p!r} missing or out of temporal order")
                if size != len(seen[p].states):
                    raise ConfigurationError(
                        f"{v.name}: CPT axis for parent {p!r} has size {size}, "
                        f"expected {len(seen[p].states)}")
            seen[v.name] = v

    @property
    def names(self):
        return tuple(v.name for v in self.variables)

    def var(self, name) -> Variable:
        for v in self.variables:
            if v.name == name:
                return v
        raise ConfigurationError(f"no variable named {name!r}")

    @property
    def n_cells(self):
        size = 1
        for v in self.variables:
            size *= len(v.states)
        return size


@dataclass(frozen=True, eq=False)
class SeparatedScm(DiscreteScm):
    """Model with the treatment split into two independent root components:
    one driving survival and covariates, one driving mediators."""

    treatment_direct: str = TREATMENT_DIRECT
    treatment_mediated: str = TREATMENT_MEDIATED

    def __post_init__(self):
        super().__post_init__()
        for name in (self.treatment_direct, self.treatment_mediated):
            if self.var(name).parents:
                raise ConfigurationError(f"treatment component {name!r} must be a root")


# -- joint tables -----------------------------------------------------------


@dataclass(frozen=True, eq=False)
class JointTable:
    """Full joint probability table; one axis per variable."""

    names: tuple[str, ...]
    states: tuple[tuple, ...]
    probs: np.ndarray

    def axis(self, name):
        try:
            return self.names.index(name)
        except ValueError:
            raise QueryError(f"no variable named {name!r} in table") from None

    def _indexer(self, assignments):
        idx = [slice(None)] * len(self.names)
        for name, value in assignments.items():
            ax = self.axis(name)
            try:
                idx[ax] = self.states[ax].index(value)
            except ValueError:
                raise QueryError(
                    f"value {value!r} not in state space of {name!r}") from None
        return tuple(idx)

    def prob(self, assignments) -> float:
        """P(assignments), marginalizing all unmentioned variables."""
        return float(self.probs[self._indexer(assignments)].sum())

    def marginal(self, names) -> "JointTable":
        """Marginal table over ``names`` in the requested axis order."""
        keep = [self.axis(n) for n in names]
        drop = tuple(i for i in range(len(self.names)) if i not in keep)
        arr = self.probs.sum(axis=drop)
        order = [sorted(keep).index(i) for i in keep]
        arr = arr.transpose(order)
        return JointTable(tuple(names), tuple(self.states[i] for i in keep), arr)

    def condition(self, assignments) -> "JointTable":
        """Sub-table with ``assignments`` fixed (axes removed, mass NOT
        renormalized; suitable for scale-invariant independence tests)."""
        idx = self._indexer(assignments)
        keep = [i for i in range(len(self.names)) if isinstance(idx[i], slice)]
        return JointTable(
            tuple(self.names[i] for i in keep),
            tuple(self.states[i] for i in keep),
            self.probs[idx],
        )

    def conditional(self, event, given, strict=False):
        """P(event | given); None when P(given) = 0 (or an error in strict
        mode)."""
        p_given = self.prob(given)
        if p_given <= 0.0:
            if strict:
                raise UndefinedConditionalError(
                    f"conditioning event has probability zero: {given}")
            return None
        return self.prob({**event, **given}) / p_given

    def total(self) -> float:
        return float(self.probs.sum())


def _expand(cpt, axes, rank):
    """Reshape a CPT so its axes land at positions ``axes`` of a rank-``rank``
    broadcastable array (all other axes are singletons)."""
    order = np.argsort(axes)
    arr = np.transpose(cpt, order)
    shape = [1] * rank
    for ax, size in zip(sorted(axes), arr.shape):
        shape[ax] = size
    return arr.reshape(shape)


def joint(scm: DiscreteScm) -> JointTable:
    """Exact joint distribution as the product of all CPTs."""
    if scm.n_cells > CELL_BUDGET:
        raise SizeError(
            f"joint table would need {scm.n_cells} cells (budget {CELL_BUDGET})")
    names = scm.names
    pos = {n: i for i, n in enumerate(names)}
    rank = len(names)
    probs = np.ones([1] * rank)
    for v in scm.variables:
        axes = [pos[p] for p in v.parents] + [pos[v.name]]
        probs = probs * _expand(v.cpt, axes, rank)
    return JointTable(names, tuple(v.states for v in scm.variables), probs)


# -- interventions ----------------------------------------------------------


def intervene(scm: DiscreteScm, assignments: dict) -> DiscreteScm:
    """Replace the CPTs of the assigned variables by point masses."""
    new_vars = []
    pending = dict(assignments)
    for v in scm.variables:
        if v.name in pending:
            idx = v.state_index(pending.pop(v.name))
            cpt = np.zeros_like(v.cpt)
            cpt[..., idx] = 1.0
            v = dataclasses.replace(v, cpt=cpt)
        new_vars.append(v)
    if pending:
        raise ConfigurationError(f"cannot intervene on unknown variables: {sorted(pending)}")
    return dataclasses.replace(scm, variables=tuple(new_vars))


def interventional_survival(sep_scm: SeparatedScm, a, a_star, t_index) -> float:
    """Exact P(alive at grid point t_index | do(direct=a, mediated=a_star))."""
    _check_t_index(sep_scm, t_index)
    fixed = intervene(sep_scm, {sep_scm.treatment_direct: a,
                                sep_scm.treatment_mediated: a_star})
    return joint(fixed).prob({survival_name(t_index): 1})


def _check_t_index(scm, t_index):
    if not 1 <= t_index <= scm.grid:
        raise QueryError(f"t_index must be in 1..{scm.grid}, got {t_index}")


# -- mediational g-formula ---------------------------------------------------


def mediational_g_formula(obs_scm: DiscreteScm, a, a_star, t_index,
                          strict=False) -> float:
    """Mixed-regime survival functional computed from the observational
    joint: survival and covariate factors are conditioned on treatment ``a``,
    mediator factors on ``a_star``.

    Histories whose conditioning event has probability zero contribute 0;
    in strict mode they raise instead.
    """
    _check_t_index(obs_scm, t_index)
    table = joint(obs_scm)
    return g_formula_from_table(table, a, a_star, t_index, strict=strict)


def g_formula_from_table(table: JointTable, a, a_star, t_index,
                         strict=False, treatment=TREATMENT) -> float:
    j = t_index
    total = 0.0
    for bits in itertools.product((0, 1), repeat=2 * j):
        m, c = bits[:j], bits[j:]

        def hist(n_med, n_cov):
            h = {mediator_name(i): m[i] for i in range(n_med)}
            h.update({covariate_name(i): c[i] for i in range(n_cov)})
            return h

        term = 1.0
        for i in range(1, j + 1):
            given = {treatment: a, **hist(i, i)}
            if i >= 2:
                given[survival_name(i - 1)] = 1
            p = table.conditional({survival_name(i): 1}, given, strict=strict)
            if p is None:
                term = None
                break
            term *= p
        if term is None:
            continue
        for i in range(j):
            given_m = {treatment: a_star, **hist(i, i)}
            given_c = {treatment: a, **hist(i + 1, i)}
            if i >= 1:
                given_m[survival_name(i)] = 1
                given_c[survival_name(i)] = 1
            pm = table.conditional({mediator_name(i): m[i]}, given_m, strict=strict)
            pc = table.conditional({covariate_name(i): c[i]}, given_c, strict=strict)
            if pm is None or pc is None:
                term = None
                break
            term *= pm * pc
        if term is not None:
            total += term
    return total


def g_computation(obs_scm: DiscreteScm, a, t_index, strict=False) -> float:
    """Single-regime g-computation: the mixed-regime formula with both
    treatment arguments equal."""
    return mediational_g_formula(obs_scm, a, a, t_index, strict=strict)


# -- exact conditional independence ------------------------------------------


def conditionally_independent(table: JointTable, x, y, z, tol=CI_TOL):
    """Exact test of X independent of Y given Z on the table.

    Returns (holds, skipped) where ``skipped`` counts conditioning strata of
    probability zero (they are vacuous and excluded from the test).  The test
    is invariant to an overall scaling of the table, so unnormalized
    sub-tables from :meth:`JointTable.condition` are acceptable.
    """
    x, y, z = list(x), list(y), list(z)
    if len(set(x) | set(y) | set(z)) != len(x) + len(y) + len(z):
        raise QueryError("variable sets must be pairwise disjoint")
    if not x or not y:
        return True, 0
    m = table.marginal(x + y + z)
    sizes = [len(s) for s in m.states]
    nx = int(np.prod(sizes[:len(x)]))
    ny = int(np.prod(sizes[len(x):len(x) + len(y)]))
    nz = int(np.prod(sizes[len(x) + len(y):])) if z else 1
    p = m.probs.reshape(nx, ny, nz)
    pz = p.sum(axis=(0, 1))
    mask = pz > 0
    skipped = int(np.count_nonzero(~mask))
    lhs = p * pz[None, None, :]
    rhs = p.sum(axis=1)[:, None, :] * p.sum(axis=0)[None, :, :]
    holds = bool(np.all(np.abs(lhs[:, :, mask] - rhs[:, :, mask]) <= tol))
    return holds, skipped


# -- Granger non-causality on lagged tables ----------------------------------


def _split_lagged(name):
    base, sep, lag = name.rpartition("@")
    if not sep:
        raise QueryError(f"variable {name!r} is not of the form 'name@lag'")
    return base, int(lag)


def _lag_index(table: JointTable):
    lags: dict[str, set[int]] = {}
    for name in table.names:
        base, lag = _split_lagged(name)
        lags.setdefault(base, set()).add(lag)
    return lags


def granger_noncausal_exact(table: JointTable, a, b, c, t_prime,
                            tol=CI_TOL) -> bool:
    """Exact Granger non-causality of the target coordinates ``b`` from ``a``
    given ``c``, tested up to time ``t_prime``: at every t the full past of
    ``a`` is independent of the time-t slice of ``b`` given the past of
    ``b`` and ``c``.

    Also evaluated through the relative-to-a-context parameterization with
    context a+b+c; the two forms must agree (internal consistency check).
    """
    if set(a) & set(b) or set(a) & set(c) or set(b) & set(c):
        raise QueryError("coordinate sets must be pairwise disjoint")
    primary = _granger_direct(table, a, b, c, t_prime, tol)
    alt = granger_noncausal_relative(table, a, b,
                                     set(a) | set(b) | set(c), t_prime, tol)
    if primary != alt:
        raise AssertionError(
            "the two Granger non-causality parameterizations disagree")
    return primary


def _granger_queries(lags, a, b, past, t_prime):
    """Query triples (x, y, z) for t = 1..t_prime: past of ``a`` vs the
    time-t slice of ``b`` given the past of ``past`` (which normally
    contains ``b`` itself)."""
    a, b = set(a), set(b)
    unknown = (a | b | past) - set(lags)
    if unknown:
        raise QueryError(f"unknown coordinate names: {sorted(unknown)}")
    if a & b or a & past:
        raise QueryError("the source coordinates may not appear in the target "
                         "or conditioning sets")
    for t in range(1, t_prime + 1):
        y = [lagged_name(p, t) for p in sorted(b) if t in lags[p]]
        if not y:
            raise QueryError(f"no target variables at time {t}")
        x = [lagged_name(p, s) for p in sorted(a)
             for s in sorted(lags[p]) if s <= t - 1]
        z = [lagged_name(p, s) for p in sorted(b | past)
             for s in sorted(lags[p]) if s <= t - 1]
        yield x, y, z


def _granger_direct(table, a, b, c, t_prime, tol):
    lags = _lag_index(table)
    for x, y, z in _granger_queries(lags, a, b, set(b) | set(c), t_prime):
        holds, _ = conditionally_independent(table, x, y, z, tol)
        if not holds:
            return False
    return True


def granger_noncausal_relative(table: JointTable, a, b, context, t_prime,
                               tol=CI_TOL) -> bool:
    """Alternative parameterization: non-causality of ``b`` from ``a``
    relative to the coordinate context ``context`` (a superset of a and b);
    the conditioning past is context minus a."""
    a, b, context = set(a), set(b), set(context)
    if not (a | b) <= context:
        raise QueryError("context must contain both coordinate sets")
    lags = _lag_index(table)
    for x, y, z in _granger_queries(lags, a, b, context - a - b, t_prime):
        holds, _ = conditionally_independent(table, x, y, z, tol)
        if not holds:
            return False
    return True


# -- mediation assumptions, exact --------------------------------------------


@dataclass(frozen=True)
class ExactAssumptionReport:
    a1: bool
    a2_discrete: bool
    a3: bool
    strata_skipped: int

    def all_hold(self):
        return self.a1 and self.a2_discrete and self.a3


def verify_assumptions_exact(sep_scm: SeparatedScm, tol=CI_TOL) -> ExactAssumptionReport:
    """Brute-force conditional-independence tests of the three mediation
    assumptions on the separated joint (both treatment components randomized
    as independent roots).  Latent variables are marginalized, never
    conditioned on.  Zero-probability conditioning strata are skipped and
    counted in the report.
    """
    table = joint(sep_scm)
    ad, am = sep_scm.treatment_direct, sep_scm.treatment_mediated
    a1 = a2 = a3 = True
    skipped = 0
    for i in range(sep_scm.grid):
        hist = [mediator_name(j) for j in range(i)]
        hist += [covariate_name(j) for j in range(i)]
        t = table if i == 0 else table.condition({survival_name(i): 1})
        ok, s = conditionally_independent(
            t, [mediator_name(i)], [ad], [am] + hist, tol)
        a1 &= ok
        skipped += s
        ok, s = conditionally_independent(
            t, [covariate_name(i)], [am], [ad, mediator_name(i)] + hist, tol)
        a3 &= ok
        skipped += s
        ok, s = conditionally_independent(
            t, [survival_name(i + 1)], [am],
            [ad, mediator_name(i), covariate_name(i)] + hist, tol)
        a2 &= ok
        skipped += s
    return ExactAssumptionReport(a1, a2, a3, skipped)


# -- random model generators --------------------------------------------------


def _as_rng(seed):
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def _random_dist(rng, n):
    p = rng.uniform(size=n)
    p /= p.sum()
    # floor keeps every conditioning stratum non-degenerate
    return p * (1.0 - n * MIN_CELL_PROB) + MIN_CELL_PROB


def _structured_cpt(rng, parent_vars, states, gate=None, absorb=None):
    """Random CPT respecting the survival bookkeeping: when the gate parent
    equals 0 the variable is deterministically ``absorb``; otherwise the row
    is a random distribution over the non-NA states."""
    shape = tuple(len(p.states) for p in parent_vars) + (len(states),)
    cpt = np.zeros(shape)
    live = [k for k, s in enumerate(states) if s != NA]
    gate_axis = None
    if gate is not None:
        gate_axis = [p.name for p in parent_vars].index(gate)
        absorb_idx = states.index(absorb)
    for idx in np.ndindex(shape[:-1]):
        if gate_axis is not None and parent_vars[gate_axis].states[idx[gate_axis]] == 0:
            cpt[idx + (absorb_idx,)] = 1.0
            continue
        cpt[idx][live] = _random_dist(rng, len(live))
    return cpt


def random_separated_scm(k_max, seed, violation=None) -> SeparatedScm:
    """Random separated model on ``k_max`` grid points.

    Without a violation, mediators depend only on the mediated treatment
    component and survival/covariates only on the direct one, so all three
    assumptions hold by construction.  ``violation`` adds one structural
    defect: 'direct_to_mediator' (breaks A1), 'mediated_to_survival' (A2),
    'mediated_to_covariate' (A3), or 'latent_confounding' (a hidden root
    feeding both mediators and survival).
    """
    if k_max < 1:
        raise ConfigurationError(f"k_max must be >= 1, got {k_max}")
    if violation is not None and violation not in VIOLATIONS:
        raise ConfigurationError(f"unknown violation {violation!r}; options: {VIOLATIONS}")
    rng = _as_rng(seed)
    variables: list[Variable] = []
    by_name: dict[str, Variable] = {}

    def add(name, states, parents, cpt):
        v = Variable(name, tuple(states), tuple(parents), cpt)
        variables.append(v)
        by_name[name] = v

    def add_random(name, states, parents, gate=None, absorb=None):
        pv = [by_name[p] for p in parents]
        add(name, states, parents, _structured_cpt(rng, pv, tuple(states), gate, absorb))

    add(TREATMENT_DIRECT, (0, 1), (), np.array([0.5, 0.5]))
    add(TREATMENT_MEDIATED, (0, 1), (), np.array([0.5, 0.5]))
    latent = violation == "latent_confounding"
    if latent:
        add_random("U", (0, 1), ())

    hist: list[str] = []
    for i in range(k_max):
        m, c = mediator_name(i), covariate_name(i)
        s_now, s_next = survival_name(i), survival_name(i + 1)
        alive = i >= 1

        m_parents = [TREATMENT_MEDIATED] + hist
        if violation == "direct_to_mediator":
            m_parents.append(TREATMENT_DIRECT)
        if latent:
            m_parents.append("U")
        if alive:
            m_parents.append(s_now)
            add_random(m, (0, 1, NA), m_parents, gate=s_now, absorb=NA)
        else:
            add_random(m, (0, 1), m_parents)

        c_parents = [TREATMENT_DIRECT] + hist + [m]
        if violation == "mediated_to_covariate":
            c_parents.append(TREATMENT_MEDIATED)
        if alive:
            c_parents.append(s_now)
            add_random(c, (0, 1, NA), c_parents, gate=s_now, absorb=NA)
        else:
            add_random(c, (0, 1), c_parents)

        s_parents = [TREATMENT_DIRECT] + hist + [m, c]
        if violation == "mediated_to_survival":
            s_parents.append(TREATMENT_MEDIATED)
        if latent:
            s_parents.append("U")
        if alive:
            s_parents.append(s_now)
            add_random(s_next, (0, 1), s_parents, gate=s_now, absorb=0)
        else:
            add_random(s_next, (0, 1), s_parents)
        hist += [m, c]

    return SeparatedScm(tuple(variables), grid=k_max)


def to_observational(sep_scm: SeparatedScm) -> DiscreteScm:
    """Merge the two treatment components into a single randomized treatment
    (the event where both components agree)."""
    ad, am = sep_scm.treatment_direct, sep_scm.treatment_mediated
    if sep_scm.var(ad).states != sep_scm.var(am).states:
        raise ConfigurationError("treatment components have different state spaces")
    new_vars = []
    for v in sep_scm.variables:
        if v.name == ad:
            new_vars.append(dataclasses.replace(v, name=TREATMENT))
            continue
        if v.name == am:
            continue
        parents = list(v.parents)
        cpt = v.cpt
        if am in parents and ad in parents:
            i, j = parents.index(ad), parents.index(am)
            i, j = min(i, j), max(i, j)
            cpt = np.stack([np.take(np.take(cpt, k, axis=j), k, axis=i)
                            for k in range(cpt.shape[i])], axis=i)
            del parents[j]
            parents[i] = TREATMENT
        else:
            parents = [TREATMENT if p in (ad, am) else p for p in parents]
        new_vars.append(dataclasses.replace(v, parents=tuple(parents), cpt=cpt))
    return DiscreteScm(tuple(new_vars), grid=sep_scm.grid)


def random_observational_scm(k_max, seed, violation=None) -> DiscreteScm:
    return to_observational(random_separated_scm(k_max, seed, violation))


def _topological_order(dag: UnrolledDag):
    nodes = sorted(dag.node_set(), key=lambda nd: (nd[1], nd[0]))
    indeg = {n: 0 for n in nodes}
    children: dict = {n: [] for n in nodes}
    for src, dst in sorted(dag.edges):
        indeg[dst] += 1
        children[src].append(dst)
    ready = sorted((n for n in nodes if indeg[n] == 0),
                   key=lambda nd: (nd[1], nd[0]), reverse=True)
    order = []
    while ready:
        n = ready.pop()
        order.append(n)
        for ch in children[n]:
            indeg[ch] -= 1
            if indeg[ch] == 0:
                ready.append(ch)
        ready.sort(key=lambda nd: (nd[1], nd[0]), reverse=True)
    return order


def random_scm_from_dag(dag: UnrolledDag, seed, n_states=2) -> DiscreteScm:
    """Random model Markov to the lagged DAG: variables are 'name@lag', each
    with a random CPT over its DAG parents (min cell probability applied)."""
    rng = _as_rng(seed)
    parents_of: dict = {}
    for src, dst in dag.edges:
        parents_of.setdefault(dst, []).append(src)
    states = tuple(range(n_states))
    variables = []
    for node in _topological_order(dag):
        parents = sorted(parents_of.get(node, []), key=lambda nd: (nd[1], nd[0]))
        shape = tuple(n_states for _ in parents) + (n_states,)
        raw = rng.uniform(size=shape)
        raw /= raw.sum(axis=-1, keepdims=True)
        cpt = raw * (1.0 - n_states * MIN_CELL_PROB) + MIN_CELL_PROB
        variables.append(Variable(
            lagged_name(*node), states,
            tuple(lagged_name(*p) for p in parents), cpt))
    return DiscreteScm(tuple(variables), grid=dag.lag_count)


# -- serialization -------------------------------------------------------------


def scm_to_dict(scm: DiscreteScm) -> dict:
    d = {
        "grid": scm.grid,
        "variables": [{"name": v.name, "states": list(v.states)}
                      for v in scm.variables],
        "parents": {v.name: list(v.parents) for v in scm.variables},
        "cpt": {v.name: v.cpt.tolist() for v in scm.variables},
    }
    if isinstance(scm, SeparatedScm):
        d["separated"] = {"direct": scm.treatment_direct,
                          "mediated": scm.treatment_mediated}
    return d


def scm_from_dict(d: dict) -> DiscreteScm:
    try:
        variables = tuple(
            Variable(
                spec["name"],
                tuple(tuple(s) if isinstance(s, list) else s
                      for s in spec["states"]),
                tuple(d["parents"][spec["name"]]),
                np.asarray(d["cpt"][spec["name"]], dtype=float),
            )
            for spec in d["variables"]
        )
        grid = int(d["grid"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigurationError(f"malformed model specification: {exc}") from exc
    sep = d.get("separated")
    if sep:
        return SeparatedScm(variables, grid=grid,
                            treatment_direct=sep["direct"],
                            treatment_mediated=sep["mediated"])
    return DiscreteScm(variables, grid=grid)
