"""Operator and generator families on graphs, axiom checkers, and the
built-in example systems (commuting evolutions, a non-commuting
interpolation family, weighted acyclic networks, Lindblad-form generators).
"""

import threading
from dataclasses import dataclass

import numpy as np

from . import linops, rewrite
from .errors import (AcyclicityError, DegeneracyError, GraphError, InputError,
                     OrderError)
from .linops import SuperOp, spectral_norm
from .reports import CheckReport


class LinearOrderGraph:
    """Finite linearly ordered node set; the edge set is all pairs (u, v)
    with u preceding (or equal to) v in the stored order.

    The stored sequence *is* the order: evolution families indexed by
    (later, earlier) time pairs are modelled by listing the time grid in
    decreasing order.  Node keys compare exactly, by position.
    """

    def __init__(self, nodes):
        self.nodes = tuple(nodes)
        self._index = {u: i for i, u in enumerate(self.nodes)}
        if len(self._index) != len(self.nodes):
            raise GraphError("linear order nodes must be distinct")

    def index(self, u):
        try:
            return self._index[u]
        except KeyError:
            raise GraphError(f"node {u!r} is not on the grid") from None

    def leq(self, u, v):
        return self.index(u) <= self.index(v)

    def has_node(self, u):
        return u in self._index

    def has_edge(self, u, v):
        return self.has_node(u) and self.has_node(v) and self.leq(u, v)

    def meet(self, u, v):
        return u if self.leq(u, v) else v

    def join(self, u, v):
        return v if self.leq(u, v) else u

    def edges(self, include_diagonal=True):
        for i, u in enumerate(self.nodes):
            for v in self.nodes[i if include_diagonal else i + 1:]:
                yield (u, v)

    def context(self):
        return rewrite.EdgeContext(self.nodes, list(self.edges()))


class CompleteGraph:
    """All ordered pairs are edges (the natural home of network families)."""

    def __init__(self, nodes):
        self.nodes = tuple(dict.fromkeys(nodes))
        self._set = set(self.nodes)

    def has_node(self, u):
        return u in self._set

    def has_edge(self, u, v):
        return self.has_node(u) and self.has_node(v)

    def edges(self):
        for u in self.nodes:
            for v in self.nodes:
                yield (u, v)

    def context(self):
        return rewrite.EdgeContext(self.nodes, list(self.edges()))


class _Family:
    """Shared machinery: a deterministic edge evaluator with a memo cache."""

    def __init__(self, graph, dim, eval_fn, name=""):
        self.graph = graph
        self.dim = int(dim)
        self._eval = eval_fn
        self.name = name
        self._cache = {}
        self._lock = threading.Lock()

    def _check_edge(self, edge):
        u, v = edge
        if not self.graph.has_edge(u, v):
            raise GraphError(f"({u!r}, {v!r}) is not an edge of the graph")

    def __call__(self, edge):
        edge = (edge[0], edge[1])
        out = self._cache.get(edge)
        if out is None:
            self._check_edge(edge)
            out = np.asarray(self._eval(edge), dtype=complex)
            if out.shape != (self.dim, self.dim):
                raise GraphError(
                    f"evaluator returned shape {out.shape}, expected "
                    f"{(self.dim, self.dim)} at edge {edge!r}"
                )
            with self._lock:
                self._cache.setdefault(edge, out)
        return out

    def sample_edges(self, rng=None, count=None):
        edges = list(self.graph.edges())
        if rng is None or count is None or count >= len(edges):
            return edges
        idx = rng.choice(len(edges), size=count, replace=False)
        return [edges[i] for i in idx]


class OperatorFamily(_Family):
    """Edge-indexed family of dim x dim matrices (the evolution operators)."""

    def __init__(self, graph, dim, eval_fn, contraction_flag=False, name=""):
        super().__init__(graph, dim, eval_fn, name)
        self.contraction_flag = contraction_flag

    def check_contractions(self, edges=None, tol=1e-10):
        edges = list(self.graph.edges()) if edges is None else edges
        worst, arg = 0.0, None
        for e in edges:
            excess = spectral_norm(self(e)) - 1.0
            if excess > worst:
                worst, arg = excess, e
        return CheckReport("contractions", worst <= tol, worst, tol, arg,
                           count=len(edges))


class GeneratorFamily(_Family):
    """Edge-indexed family of generators; the induced evolution operators
    are ``expm(alpha * A(edge))``."""

    def __init__(self, graph, dim, eval_fn, dissipative_flag=False, name=""):
        super().__init__(graph, dim, eval_fn, name)
        self.dissipative_flag = dissipative_flag

    def exponential(self, alpha=1.0, name=None):
        return OperatorFamily(
            self.graph, self.dim,
            lambda e: linops.expm(alpha * self(e)),
            contraction_flag=self.dissipative_flag,
            name=name or (self.name + "-exp"),
        )

    def check_dissipative(self, edges=None, tol=1e-10):
        edges = list(self.graph.edges()) if edges is None else edges
        worst, arg = 0.0, None
        for e in edges:
            top = float(np.linalg.eigvalsh(linops.hermitian_part(self(e))).max())
            if top > worst:
                worst, arg = top, e
        return CheckReport("dissipative", worst <= tol, worst, tol, arg,
                           count=len(edges))


@dataclass
class LengthFunction:
    """Edge length bound; ``kind`` is one of additive/superadditive/subadditive."""

    eval_fn: object
    kind: str = "superadditive"

    def __post_init__(self):
        if self.kind not in ("additive", "superadditive", "subadditive"):
            raise InputError(f"unknown length-function kind {self.kind!r}")

    def __call__(self, edge):
        val = float(self.eval_fn(edge))
        if val < 0:
            raise OrderError(f"length function negative at {edge!r}")
        return val

    def check(self, graph, triples=None, tol=1e-12):
        """Verify vanishing on loops plus the kind's inequality on triples."""
        nodes = graph.nodes
        worst, arg = 0.0, None
        for u in nodes:
            d = abs(self((u, u)))
            if d > worst:
                worst, arg = d, (u, u, u)
        if triples is None:
            triples = [(u, v, w)
                       for i, u in enumerate(nodes)
                       for j, v in enumerate(nodes[i:], i)
                       for w in nodes[j:]]
        for (u, v, w) in triples:
            split = self((u, v)) + self((v, w))
            whole = self((u, w))
            if self.kind == "additive":
                d = abs(whole - split)
            elif self.kind == "superadditive":
                d = max(0.0, split - whole)
            else:
                d = max(0.0, whole - split)
            if d > worst:
                worst, arg = d, (u, v, w)
        return CheckReport(f"length-{self.kind}", worst <= tol, worst, tol, arg,
                           count=len(triples))


def proportional_length(scale):
    """l(u, v) = scale * |v - u| for numeric node keys (additive)."""
    return LengthFunction(lambda e: scale * abs(e[1] - e[0]), "additive")


# -- axiom checkers ------------------------------------------------------------

def check_identity_axiom(fam, tol=1e-10, nodes=None):
    nodes = fam.graph.nodes if nodes is None else nodes
    eye = linops.eye(fam.dim)
    worst, arg, offenders = 0.0, None, []
    for u in nodes:
        d = spectral_norm(fam((u, u)) - eye)
        if d > tol:
            offenders.append((u, d))
        if d > worst:
            worst, arg = d, u
    return CheckReport("identity-axiom", worst <= tol, worst, tol, arg,
                       count=len(nodes), offenders=offenders[:10])


def divisibility_defect(fam, u, v, w):
    """Norm of phi(u,w) - phi(u,v) phi(v,w); zero iff divisible at the triple."""
    for e in ((u, v), (v, w), (u, w)):
        if not fam.graph.has_edge(*e):
            raise GraphError(f"missing edge {e!r}")
    return spectral_norm(fam((u, w)) - fam((u, v)) @ fam((v, w)))


def additivity_defect(gen, u, v, w):
    """Norm of A(u,w) - A(u,v) - A(v,w)."""
    for e in ((u, v), (v, w), (u, w)):
        if not gen.graph.has_edge(*e):
            raise GraphError(f"missing edge {e!r}")
    return spectral_norm(gen((u, w)) - gen((u, v)) - gen((v, w)))


def _ordered_triples(graph, rng=None, count=None):
    nodes = graph.nodes
    triples = [(u, v, w)
               for i, u in enumerate(nodes)
               for j, v in enumerate(nodes[i:], i)
               for w in nodes[j:]]
    if rng is not None and count is not None and count < len(triples):
        idx = rng.choice(len(triples), size=count, replace=False)
        triples = [triples[i] for i in idx]
    return triples


def check_divisibility(fam, tol=1e-9, rng=None, count=None):
    triples = _ordered_triples(fam.graph, rng, count)
    worst, arg = 0.0, None
    for (u, v, w) in triples:
        d = divisibility_defect(fam, u, v, w)
        if d > worst:
            worst, arg = d, (u, v, w)
    return CheckReport("divisibility-axiom", worst <= tol, worst, tol, arg,
                       count=len(triples))


def check_additivity(gen, tol=1e-9, rng=None, count=None):
    triples = _ordered_triples(gen.graph, rng, count)
    worst, arg = 0.0, None
    for (u, v, w) in triples:
        d = additivity_defect(gen, u, v, w)
        if d > worst:
            worst, arg = d, (u, v, w)
    return CheckReport("additivity-axiom", worst <= tol, worst, tol, arg,
                       count=len(triples))


def check_geometric_growth(fam, ell, edges=None, tol=1e-12):
    """Operator families: |phi(e) - 1| <= l(e).  Generator families: |A(e)| <= l(e)."""
    edges = list(fam.graph.edges()) if edges is None else edges
    eye = linops.eye(fam.dim)
    is_gen = isinstance(fam, GeneratorFamily)
    worst, arg, offenders = 0.0, None, []
    for e in edges:
        val = fam(e)
        lhs = spectral_norm(val if is_gen else val - eye)
        excess = lhs - ell(e)
        if excess > tol:
            offenders.append((e, excess))
        if excess > worst:
            worst, arg = excess, e
    return CheckReport("geometric-growth", worst <= tol, worst, tol, arg,
                       count=len(edges), offenders=offenders[:10])


def lipschitz_check(fam, pairs, ell=None, bound_const=None, gen=None, tol=1e-10):
    """Four-term modulus bound on |phi(u,v) - phi(u',v')| for edge pairs.

    With ``gen`` given, the bound is the sum of the four generator norms
    |A(m,u)| + |A(v,M)| + |A(m,u')| + |A(v',M)| where m/M are the meet/join
    of the tails/heads.  Otherwise it is ``bound_const`` times the same four
    terms of ``ell``.
    """
    if gen is None and (ell is None or bound_const is None):
        raise InputError("need either gen or (ell and bound_const)")
    g = fam.graph
    worst, arg, offenders = -np.inf, None, []
    for (e, e2) in pairs:
        (u, v), (u2, v2) = e, e2
        m = g.meet(u, u2)
        big = g.join(v, v2)
        lhs = spectral_norm(fam(e) - fam(e2))
        corners = [(m, u), (v, big), (m, u2), (v2, big)]
        if gen is not None:
            bound = sum(spectral_norm(gen(c)) for c in corners)
        else:
            bound = bound_const * sum(ell(c) for c in corners)
        excess = lhs - bound
        if excess > tol:
            offenders.append(((e, e2), excess))
        if excess > worst:
            worst, arg = excess, (e, e2)
    return CheckReport("lipschitz-bound", not offenders, max(worst, 0.0), tol,
                       arg, count=len(pairs), offenders=offenders[:10])


# -- integrated generator families --------------------------------------------

def integrate_generators(a_of_tau, s, t, tol=1e-10, max_panels=4096):
    """Composite-Simpson integral of the generator curve over [s, t].

    Panels double until two successive estimates agree to ``tol``; suppliers
    of closed forms should bypass this and provide the antiderivative
    directly.
    """
    if t < s:
        raise OrderError(f"integration bounds out of order: t={t} < s={s}")
    if t == s:
        probe = np.asarray(a_of_tau(s), dtype=complex)
        return np.zeros_like(probe)

    def simpson(panels):
        xs = np.linspace(s, t, 2 * panels + 1)
        h = (t - s) / (2 * panels)
        total = np.asarray(a_of_tau(xs[0]), dtype=complex).copy()
        for i, x in enumerate(xs[1:-1], 1):
            total += (4.0 if i % 2 else 2.0) * np.asarray(a_of_tau(x), dtype=complex)
        total += np.asarray(a_of_tau(xs[-1]), dtype=complex)
        return (h / 3.0) * total

    prev = simpson(4)
    panels = 8
    while panels <= max_panels:
        cur = simpson(panels)
        if spectral_norm(cur - prev) < tol:
            return cur
        prev = cur
        panels *= 2
    return prev


def descending_grid(t_max, points):
    """Time grid listed from t_max down to 0: edges are (later, earlier)."""
    if points < 2:
        raise InputError("need at least two grid points")
    return LinearOrderGraph(tuple(np.linspace(t_max, 0.0, points)))


def interpolated_commutator_coefficients(t, s, t_max):
    """Coefficients (c1, c2) of the integrated two-Hamiltonian interpolation:
    the generator over [s, t] is c1 * K1 + c2 * K2 where Ki = i[h_i, .]."""
    lam = (t + s) / (2.0 * t_max)
    scale = (t - s) / t_max
    return scale * lam, scale * (1.0 - lam)


def example_indivisible(h1, h2, t_max=1.0, grid_points=9, tol=1e-12):
    """Generator family interpolating two non-commuting Hamiltonian
    directions over a descending time grid; divisibility of its exponential
    family fails whenever [h1, h2] does not commute with everything.
    """
    h1 = np.asarray(h1, dtype=complex)
    h2 = np.asarray(h2, dtype=complex)
    if not linops.is_hermitian(h1, tol) or not linops.is_hermitian(h2, tol):
        raise InputError("h1 and h2 must be Hermitian")
    hat = linops.commutator(h1, h2)
    # tr[h1,h2] = 0, so [h1,h2] is central iff it vanishes
    if spectral_norm(hat) <= tol:
        raise DegeneracyError("[h1, h2] is central; the family would be divisible")
    d = h1.shape[0]
    psi1 = 1j * SuperOp.commutator_with(h1).matrix
    psi2 = 1j * SuperOp.commutator_with(h2).matrix
    graph = descending_grid(t_max, grid_points)

    def gen(edge):
        t, s = edge  # descending grid: t >= s numerically
        c1, c2 = interpolated_commutator_coefficients(t, s, t_max)
        return c1 * psi1 + c2 * psi2

    return GeneratorFamily(graph, d * d, gen, dissipative_flag=True,
                           name="two-hamiltonian-interpolation")


def commuting_evolution(rate, t_max=1.0, grid_points=9):
    """Memoryless divisible demo family phi(t, s) = expm((t - s) * rate) on a
    descending grid; ``rate`` should be dissipative for contractions."""
    rate = np.asarray(rate, dtype=complex)
    graph = descending_grid(t_max, grid_points)
    gen = GeneratorFamily(graph, rate.shape[0],
                          lambda e: (e[0] - e[1]) * rate,
                          dissipative_flag=linops.is_dissipative_hilbert(rate),
                          name="memoryless")
    return gen


# -- Lindblad-form generators ---------------------------------------------------

def lindblad_generator(h, psi):
    """Generator i[h, .] + Psi - (1/2){Psi(1), .} for Hermitian h and a
    completely positive map Psi (as a SuperOp)."""
    h = np.asarray(h, dtype=complex)
    if not linops.is_hermitian(h):
        raise InputError("Hamiltonian part must be Hermitian")
    d = h.shape[0]
    if psi.dim != d:
        raise InputError("dimension mismatch between h and Psi")
    psi_of_one = psi.apply(linops.eye(d))
    m = (1j * SuperOp.commutator_with(h).matrix
         + psi.matrix
         - 0.5 * SuperOp.anticommutator_with(psi_of_one).matrix)
    return SuperOp(d, m)


def dissipation_map(l, a, b):
    """D_L(a, b) = L(b* a) - (L(b)* a + b* L(a))."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    bd = linops.dagger(b)
    return l.apply(bd @ a) - (linops.dagger(l.apply(b)) @ a + bd @ l.apply(a))


def check_schwarz_generator(l, samples, tol=1e-10, alphas=(0.1, 1.0, 10.0)):
    """Certify the three generator conditions and, on success, sampled
    contraction of the induced maps.

    Conditions: L(1) = 0; L maps adjoints to adjoints (checked on matrix
    units); D_L(a, a) >= 0 on every sample.  On pass the induced maps
    expm(alpha * L) are checked to not expand operator norms on the samples.
    """
    d = l.dim
    eye = linops.eye(d)
    details = {"alphas": list(alphas), "samples": len(samples)}
    unital_defect = spectral_norm(l.apply(eye))
    sa_defect = 0.0
    for i in range(d):
        for j in range(d):
            e_ij = np.zeros((d, d), dtype=complex)
            e_ij[i, j] = 1.0
            sa_defect = max(sa_defect, spectral_norm(
                l.apply(linops.dagger(e_ij)) - linops.dagger(l.apply(e_ij))))
    psd_defect = 0.0
    for a in samples:
        m = dissipation_map(l, a, a)
        val = float(np.linalg.eigvalsh(linops.hermitian_part(m)).min())
        herm = spectral_norm(m - linops.dagger(m))
        psd_defect = max(psd_defect, max(0.0, -val), herm)
    conditions_ok = max(unital_defect, sa_defect, psd_defect) <= tol
    details.update(unital_defect=unital_defect, self_adjoint_defect=sa_defect,
                   dissipation_psd_defect=psd_defect)
    contraction_defect = 0.0
    if conditions_ok:
        for alpha in alphas:
            phi = l.expm(alpha)
            for a in samples:
                excess = spectral_norm(phi.apply(a)) - spectral_norm(a)
                contraction_defect = max(contraction_defect, excess)
        details["contraction_defect"] = contraction_defect
    worst = max(unital_defect, sa_defect, psd_defect, contraction_defect)
    return CheckReport("schwarz-generator", conditions_ok and
                       contraction_defect <= 10 * tol, worst, tol,
                       details=details, count=len(samples))


# -- weighted acyclic networks ---------------------------------------------------

class DagNetwork:
    """Finite acyclic directed graph with matrix edge weights."""

    def __init__(self, nodes, edges, weights, dim):
        self.nodes = tuple(dict.fromkeys(nodes))
        self.edges = [tuple(e) for e in edges]
        self.dim = int(dim)
        self.weights = {tuple(e): np.asarray(w, dtype=complex)
                        for e, w in weights.items()}
        for e in self.edges:
            if e not in self.weights:
                raise GraphError(f"edge {e!r} has no weight")
            if self.weights[e].shape != (self.dim, self.dim):
                raise GraphError(f"weight at {e!r} has wrong shape")
        self._succ = {u: [] for u in self.nodes}
        indeg = {u: 0 for u in self.nodes}
        for (t, h) in self.edges:
            if t not in indeg or h not in indeg:
                raise GraphError(f"edge ({t!r}, {h!r}) uses unknown nodes")
            self._succ[t].append(h)
            indeg[h] += 1
        # Kahn's algorithm: a leftover node means a directed cycle
        queue = [u for u in self.nodes if indeg[u] == 0]
        seen = 0
        while queue:
            u = queue.pop()
            seen += 1
            for v in self._succ[u]:
                indeg[v] -= 1
                if indeg[v] == 0:
                    queue.append(v)
        if seen != len(self.nodes):
            raise AcyclicityError("the weighted graph has a directed cycle")

    def successors(self, u):
        return self._succ[u]

    def weight(self, u, v):
        return self.weights[(u, v)]


def enumerate_walks(net, u, v, cap=10_000):
    """All directed walks from u to v, as node sequences (oracle-sized nets)."""
    out = []

    def go(prefix):
        if len(out) > cap:
            raise GraphError(f"more than {cap} walks; network too large")
        cur = prefix[-1]
        if cur == v:
            out.append(tuple(prefix))
        for nxt in net.successors(cur):
            go(prefix + [nxt])

    if net is not None and u in net._succ and v in net._succ:
        go([u])
    return out


def network_family(net):
    """Path-sum family on the complete graph over the network's nodes:
    phi(u, v) sums the ordered weight products over all directed walks.
    Loops contribute the empty product, so phi(u, u) = 1."""
    graph = CompleteGraph(net.nodes)
    eye = linops.eye(net.dim)
    memo = {}

    def phi(edge):
        u, v = edge
        key = (u, v)
        if key in memo:
            return memo[key]
        total = eye.copy() if u == v else np.zeros((net.dim, net.dim), dtype=complex)
        for z in net.successors(u):
            total = total + net.weight(u, z) @ phi((z, v))
        memo[key] = total
        return total

    return OperatorFamily(graph, net.dim, phi, name="network-path-sum")


def network_defect(net, u, v, w):
    """Path-sum over the walks from u to w that avoid node v.

    Equals phi(u, w) - phi(u, v) phi(v, w) for the network family (walks
    through v factor through the pair product; the rest is the defect).
    """
    for x in (u, v, w):
        if x not in net._succ:
            raise GraphError(f"node {x!r} is not in the network")
    if u == v or w == v:
        return np.zeros((net.dim, net.dim), dtype=complex)
    eye = linops.eye(net.dim)
    memo = {}

    def phi_avoiding(x):
        if x in memo:
            return memo[x]
        total = eye.copy() if x == w else np.zeros((net.dim, net.dim), dtype=complex)
        for z in net.successors(x):
            if z != v:
                total = total + net.weight(x, z) @ phi_avoiding(z)
        memo[x] = total
        return total

    return phi_avoiding(u)


# -- JSON system specs ------------------------------------------------------------

def graph_from_spec(spec):
    """Graph spec with an "order" list -> LinearOrderGraph; otherwise an
    EdgeContext-backed plain graph is not orderable and only suits the
    discrete machinery."""
    if "order" in spec:
        return LinearOrderGraph(spec["order"])
    return rewrite.context_from_spec(spec)


def build_system(spec):
    """Parse a system spec into (graph, family-or-generators, extras).

    {"graph": {...}, "dim": d, "family": {"kind": ..., ...}} with kinds
    "explicit", "exponential", "network", "indivisible-example", "cptp".
    """
    try:
        fam_spec = dict(spec["family"])
        kind = fam_spec.pop("kind")
    except (KeyError, TypeError) as exc:
        raise InputError(f"malformed system spec: {exc}") from exc
    builder = _SYSTEM_BUILDERS.get(kind)
    if builder is None:
        raise InputError(f"unknown family kind {kind!r}")
    return builder(spec, fam_spec)


def _edge_matrix_table(entries):
    table = {}
    for item in entries:
        edge = tuple(item["edge"])
        table[edge] = linops.matrix_from_literal(item["matrix"])
    return table


def _build_explicit(spec, fam_spec):
    graph = LinearOrderGraph(spec["graph"]["order"])
    dim = int(spec["dim"])
    table = _edge_matrix_table(fam_spec["values"])
    eye = linops.eye(dim)

    def phi(edge):
        if edge[0] == edge[1] and edge not in table:
            return eye
        try:
            return table[edge]
        except KeyError:
            raise GraphError(f"no value supplied for edge {edge!r}") from None

    fam = OperatorFamily(graph, dim, phi,
                         contraction_flag=bool(fam_spec.get("contractions", False)))
    return {"graph": graph, "family": fam, "kind": "explicit",
            "ell": _parse_ell(fam_spec)}


def _build_exponential(spec, fam_spec):
    graph = LinearOrderGraph(spec["graph"]["order"])
    dim = int(spec["dim"])
    if "rate" in fam_spec:
        rate = linops.matrix_from_literal(fam_spec["rate"])
        gen_fn = lambda e: (e[0] - e[1]) * rate
        dissip = linops.is_dissipative_hilbert(rate)
    else:
        table = _edge_matrix_table(fam_spec["generators"])
        zero = np.zeros((dim, dim), dtype=complex)

        def gen_fn(edge):
            if edge[0] == edge[1] and edge not in table:
                return zero
            try:
                return table[edge]
            except KeyError:
                raise GraphError(f"no generator for edge {edge!r}") from None

        dissip = bool(fam_spec.get("dissipative", False))
    gens = GeneratorFamily(graph, dim, gen_fn, dissipative_flag=dissip)
    alpha = float(fam_spec.get("alpha", 1.0))
    return {"graph": graph, "family": gens.exponential(alpha),
            "generators": gens, "alpha": alpha, "kind": "exponential",
            "ell": _parse_ell(fam_spec)}


def _build_network(spec, fam_spec):
    gspec = spec["graph"]
    dim = int(spec["dim"])
    weights = {tuple(item["edge"]): linops.matrix_from_literal(item["matrix"])
               for item in fam_spec["weights"]}
    net = DagNetwork(gspec["nodes"], [tuple(e) for e in gspec["edges"]],
                     weights, dim)
    fam = network_family(net)
    return {"graph": fam.graph, "family": fam, "network": net, "kind": "network"}


def _build_indivisible(spec, fam_spec):
    h1 = linops.matrix_from_literal(fam_spec["h1"])
    h2 = linops.matrix_from_literal(fam_spec["h2"])
    t_max = float(fam_spec.get("t_max", 1.0))
    points = int(fam_spec.get("grid_points", 9))
    alpha = float(fam_spec.get("alpha", 1.0))
    gens = example_indivisible(h1, h2, t_max, points)
    c0 = max(spectral_norm(1j * SuperOp.commutator_with(h).matrix)
             for h in (h1, h2)) / t_max
    return {"graph": gens.graph, "family": gens.exponential(alpha),
            "generators": gens, "alpha": alpha, "kind": "indivisible-example",
            "ell": proportional_length(alpha * c0)}


def _build_cptp(spec, fam_spec):
    from . import dilate  # local import: dilate depends on this module

    graph = LinearOrderGraph(spec["graph"]["order"])
    dim = int(spec["dim"])
    channels = {}
    for item in fam_spec["channels"]:
        channels[tuple(item["edge"])] = dilate.channel_from_spec(item["channel"])
    ident = dilate.Channel.identity(dim)

    def get_channel(edge):
        if edge[0] == edge[1] and edge not in channels:
            return ident
        try:
            return channels[edge]
        except KeyError:
            raise GraphError(f"no channel for edge {edge!r}") from None

    fam = OperatorFamily(graph, dim * dim,
                         lambda e: get_channel(e).superop().matrix,
                         name="cptp-superop")
    return {"graph": graph, "family": fam, "channels": get_channel,
            "dim": dim, "kind": "cptp"}


def _parse_ell(fam_spec):
    spec = fam_spec.get("ell")
    if spec is None:
        return None
    if spec.get("kind") == "proportional":
        return proportional_length(float(spec["scale"]))
    raise InputError(f"unknown length-function spec {spec!r}")


_SYSTEM_BUILDERS = {
    "explicit": _build_explicit,
    "exponential": _build_exponential,
    "network": _build_network,
    "indivisible-example": _build_indivisible,
    "cptp": _build_cptp,
}
