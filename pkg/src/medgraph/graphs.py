"""Process-level graphs with optional contemporaneous ("tailed") edges and
variable-level DAGs over lagged node copies.

A rolled graph has one node per coordinate process or baseline variable.  A
directed edge i -> j means lagged influence only; a tailed edge i o-> j means
the influence may also be contemporaneous.  The unrolled counterpart is a DAG
whose nodes are (name, lag) pairs.

Graphs are immutable after construction; all queries are pure functions.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

from .errors import GraphError, ParseError, UnknownNodeError

log = logging.getLogger(__name__)

PROCESS = "process"
BASELINE = "baseline"

Edge = tuple[str, str]


def _closure(targets, parent_map):
    """Transitive closure of ``parent_map`` (node -> set of direct sources)
    starting from ``targets``.  Returns everything reachable against edge
    direction, including any target reachable from another target."""
    seen = set()
    stack = list(targets)
    while stack:
        node = stack.pop()
        for src in parent_map.get(node, ()):
            if src not in seen:
                seen.add(src)
                stack.append(src)
    return seen


@dataclass(frozen=True)
class TailedDirectedGraph:
    """Rolled graph: directed + tailed directed edges over named nodes.

    ``baseline`` is the subset of node names representing baseline variables;
    the rest are process nodes.
    """

    nodes: frozenset[str]
    baseline: frozenset[str]
    directed: frozenset[Edge]
    tailed: frozenset[Edge]

    @classmethod
    def build(cls, nodes, baseline=(), directed=(), tailed=()):
        nodes = frozenset(nodes)
        baseline = frozenset(baseline)
        directed = set(map(tuple, directed))
        tailed = set(map(tuple, tailed))
        if not baseline <= nodes:
            raise GraphError(f"baseline names not among nodes: {sorted(baseline - nodes)}")
        for (a, b) in directed | tailed:
            for name in (a, b):
                if name not in nodes:
                    raise UnknownNodeError(f"edge endpoint {name!r} is not a declared node")
        overlap = directed & tailed
        if overlap:
            raise GraphError(f"edges both plain and tailed: {sorted(overlap)}")
        loops = {(a, b) for (a, b) in directed | tailed if a == b}
        if loops:
            # A process's dependence on its own past is implicit in rolled
            # graphs; unrolling re-introduces the same-process lag edges.
            log.info("dropping self-loops on construction: %s", sorted(a for a, _ in loops))
            directed -= loops
            tailed -= loops
        for (a, b) in directed:
            if b in baseline:
                raise GraphError(f"plain directed edge into baseline node {b!r}: {a}->{b}")
        for (a, b) in tailed:
            if b in baseline and a not in baseline:
                raise GraphError(f"edge into baseline node {b!r} from process node {a!r}")
        return cls(nodes, baseline, frozenset(directed), frozenset(tailed))

    # -- basic structure -------------------------------------------------

    @property
    def process_nodes(self) -> frozenset[str]:
        return self.nodes - self.baseline

    @property
    def all_edges(self) -> frozenset[Edge]:
        """Directed and tailed edges together (the edge set of D-minus)."""
        return self.directed | self.tailed

    def sorted_nodes(self):
        return sorted(self.nodes)

    def _parent_map(self, edges):
        parents: dict[str, set[str]] = {}
        for a, b in edges:
            parents.setdefault(b, set()).add(a)
        return parents

    def _check_known(self, names):
        unknown = set(names) - self.nodes
        if unknown:
            raise UnknownNodeError(f"unknown node names: {sorted(unknown)}")

    # -- queries ---------------------------------------------------------

    def ancestors(self, target, include_target=False):
        """an(target) over all edges; ``include_target`` gives an+(target)."""
        target = set(target)
        self._check_known(target)
        anc = _closure(target, self._parent_map(self.all_edges))
        return anc | target if include_target else anc

    def descendants(self, source):
        source = set(source)
        self._check_known(source)
        children = {}
        for a, b in self.all_edges:
            children.setdefault(a, set()).add(b)
        return _closure(source, children)

    def tailed_ancestors(self, target):
        """Nodes with a directed path of tailed edges into ``target``;
        by convention the result never contains target nodes themselves."""
        target = set(target)
        self._check_known(target)
        return _closure(target, self._parent_map(self.tailed)) - target

    def tailed_descendants(self, source):
        source = set(source)
        self._check_known(source)
        children = {}
        for a, b in self.tailed:
            children.setdefault(a, set()).add(b)
        return _closure(source, children) - source

    def tailed_parents(self, target):
        target = set(target)
        self._check_known(target)
        return {a for a, b in self.tailed if b in target} - target

    def tailed_ancestors_process(self, target):
        """Tailed ancestors restricted to process nodes."""
        return self.tailed_ancestors(target) & self.process_nodes

    def strip_tails(self) -> "TailedDirectedGraph":
        """Forget the contemporaneous annotation: every tailed edge becomes a
        plain directed edge.  Idempotent."""
        if not self.tailed:
            return self
        # Tailed baseline->baseline edges become plain directed edges into
        # baseline nodes; bypass the constructor check for this internal form.
        return TailedDirectedGraph(self.nodes, self.baseline,
                                   self.directed | self.tailed, frozenset())

    def remove_edges_out_of(self, sources) -> "TailedDirectedGraph":
        """Auxiliary graph with all directed edges starting in ``sources``
        deleted.  Apply to a stripped graph when testing delta-separation."""
        sources = set(sources)
        self._check_known(sources)
        return TailedDirectedGraph(
            self.nodes, self.baseline,
            frozenset((a, b) for a, b in self.directed if a not in sources),
            frozenset((a, b) for a, b in self.tailed if a not in sources),
        )

    def tailed_subgraph_is_acyclic(self) -> bool:
        """True if the tailed edges alone form an acyclic graph."""
        return _is_acyclic(self.nodes, self.tailed)


def _is_acyclic(nodes, edges):
    indeg = {n: 0 for n in nodes}
    children: dict[str, list[str]] = {n: [] for n in nodes}
    for a, b in edges:
        indeg[b] += 1
        children[a].append(b)
    queue = [n for n in nodes if indeg[n] == 0]
    seen = 0
    while queue:
        n = queue.pop()
        seen += 1
        for c in children[n]:
            indeg[c] -= 1
            if indeg[c] == 0:
                queue.append(c)
    return seen == len(nodes)


def find_tailed_cycle(graph: TailedDirectedGraph):
    """Return one cycle (list of node names) in the tailed subgraph, or None."""
    children: dict[str, list[str]] = {}
    for a, b in sorted(graph.tailed):
        children.setdefault(a, []).append(b)
    color = {}
    parent = {}

    def dfs(n):
        color[n] = 1
        for c in children.get(n, ()):
            if color.get(c, 0) == 1:
                cycle = [c, n]
                cur = n
                while cur != c:
                    cur = parent[cur]
                    cycle.append(cur)
                cycle.reverse()
                return cycle
            if color.get(c, 0) == 0:
                parent[c] = n
                found = dfs(c)
                if found:
                    return found
        color[n] = 2
        return None

    for n in graph.sorted_nodes():
        if color.get(n, 0) == 0:
            found = dfs(n)
            if found:
                return found
    return None


LaggedNode = tuple[str, int]


@dataclass(frozen=True)
class UnrolledDag:
    """Variable-level DAG on (name, lag) copies of each process, with
    baseline variables present at lag 0 only."""

    lag_count: int
    process_names: frozenset[str]
    baseline_names: frozenset[str]
    edges: frozenset[tuple[LaggedNode, LaggedNode]]

    @classmethod
    def build(cls, lag_count, process_names, baseline_names, edges):
        if lag_count < 1:
            raise GraphError(f"lag_count must be >= 1, got {lag_count}")
        process_names = frozenset(process_names)
        baseline_names = frozenset(baseline_names)
        if process_names & baseline_names:
            raise GraphError("process and baseline name sets overlap")
        obj = cls(lag_count, process_names, baseline_names, frozenset(map(_as_edge, edges)))
        nodes = obj.node_set()
        for (src, dst) in obj.edges:
            for nd in (src, dst):
                if nd not in nodes:
                    raise GraphError(f"edge endpoint {nd} not a valid lagged node")
            if src[1] > dst[1]:
                raise GraphError(f"edge goes backwards in time: {src} -> {dst}")
            if src == dst:
                raise GraphError(f"self-loop {src}")
        if not _is_acyclic(nodes, obj.edges):
            raise GraphError("unrolled graph contains a directed cycle")
        return obj

    def node_set(self) -> set[LaggedNode]:
        nodes = {(name, t) for name in self.process_names for t in range(self.lag_count + 1)}
        nodes |= {(name, 0) for name in self.baseline_names}
        return nodes

    def sorted_nodes(self):
        return sorted(self.node_set(), key=lambda nd: (nd[1], nd[0]))

    def _check_known(self, names):
        unknown = set(names) - self.node_set()
        if unknown:
            raise UnknownNodeError(f"unknown lagged nodes: {sorted(unknown)}")

    def ancestors(self, target, include_target=False):
        target = set(map(_as_node, target))
        self._check_known(target)
        parents: dict[LaggedNode, set[LaggedNode]] = {}
        for a, b in self.edges:
            parents.setdefault(b, set()).add(a)
        anc = _closure(target, parents)
        return anc | target if include_target else anc

    def restrict_lags(self, max_lag) -> "UnrolledDag":
        """Subgraph on lags 0..max_lag."""
        if not 1 <= max_lag <= self.lag_count:
            raise GraphError(f"max_lag must be in 1..{self.lag_count}")
        return UnrolledDag(
            max_lag, self.process_names, self.baseline_names,
            frozenset(e for e in self.edges if e[0][1] <= max_lag and e[1][1] <= max_lag),
        )


def _as_edge(e):
    (a, b) = e
    return (_as_node(a), _as_node(b))


def _as_node(n):
    name, lag = n
    return (str(name), int(lag))


# -- graph DSL ("\.lig" files) -------------------------------------------


@dataclass
class GraphSpecFile:
    """Parsed DSL file: the graph plus role/latent annotations."""

    graph: TailedDirectedGraph
    latent: frozenset[str] = frozenset()
    roles: dict[str, list[str]] = field(default_factory=dict)


def parse_lig(text: str) -> GraphSpecFile:
    """Parse the graph DSL.  One statement per line; '#' starts a comment.

    Statements::

        node <name> [baseline]
        <a> -> <b>
        <a> o-> <b>
        unobserved <name>
        role <role-name> <node>
    """
    nodes: list[str] = []
    baseline: set[str] = set()
    directed: list[Edge] = []
    tailed: list[Edge] = []
    latent: set[str] = set()
    roles: dict[str, list[str]] = {}

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        if tokens[0] == "node":
            if len(tokens) == 2:
                name = tokens[1]
            elif len(tokens) == 3 and tokens[2] == "baseline":
                name = tokens[1]
                baseline.add(name)
            else:
                raise ParseError(f"bad node statement: {line!r}", lineno)
            if name in nodes:
                raise ParseError(f"duplicate node name {name!r}", lineno)
            nodes.append(name)
        elif tokens[0] == "unobserved":
            if len(tokens) != 2:
                raise ParseError(f"bad unobserved statement: {line!r}", lineno)
            if tokens[1] not in nodes:
                raise ParseError(f"unobserved names unknown node {tokens[1]!r}", lineno)
            latent.add(tokens[1])
        elif tokens[0] == "role":
            if len(tokens) != 3:
                raise ParseError(f"bad role statement: {line!r}", lineno)
            if tokens[2] not in nodes:
                raise ParseError(f"role names unknown node {tokens[2]!r}", lineno)
            roles.setdefault(tokens[1], []).append(tokens[2])
        elif len(tokens) == 3 and tokens[1] in ("->", "o->"):
            a, op, b = tokens
            for name in (a, b):
                if name not in nodes:
                    raise ParseError(f"edge references undeclared node {name!r}", lineno)
            (directed if op == "->" else tailed).append((a, b))
        else:
            raise ParseError(f"unrecognized statement: {tokens[0]!r}", lineno)

    try:
        graph = TailedDirectedGraph.build(nodes, baseline, directed, tailed)
    except GraphError as exc:
        raise ParseError(str(exc)) from exc
    return GraphSpecFile(graph=graph, latent=frozenset(latent), roles=roles)


def format_lig(graph: TailedDirectedGraph, latent=(), roles=None) -> str:
    """Serialize a graph back to DSL text (deterministic ordering)."""
    lines = []
    for name in graph.sorted_nodes():
        lines.append(f"node {name} baseline" if name in graph.baseline else f"node {name}")
    for a, b in sorted(graph.directed):
        lines.append(f"{a} -> {b}")
    for a, b in sorted(graph.tailed):
        lines.append(f"{a} o-> {b}")
    for name in sorted(latent):
        lines.append(f"unobserved {name}")
    for role in sorted(roles or {}):
        for name in sorted((roles or {})[role]):
            lines.append(f"role {role} {name}")
    return "\n".join(lines) + "\n"


def lagged_name(name: str, lag: int) -> str:
    return f"{name}@{lag}"


def format_unrolled_lig(dag: UnrolledDag) -> str:
    """Serialize an unrolled DAG in the same DSL with '<name>@<lag>' nodes."""
    lines = []
    for (name, lag) in dag.sorted_nodes():
        kind = " baseline" if name in dag.baseline_names else ""
        lines.append(f"node {lagged_name(name, lag)}{kind}")
    for (a, b) in sorted(dag.edges, key=lambda e: (e[0][1], e[0][0], e[1][1], e[1][0])):
        lines.append(f"{lagged_name(*a)} -> {lagged_name(*b)}")
    return "\n".join(lines) + "\n"
