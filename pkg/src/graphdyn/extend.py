"""Lifting edge-indexed families to group-indexed families.

Three constructions, in increasing order of required structure:

* normal-form extension: multiply the family values along the letters of an
  element's normal form (identity axiom only, any graph);
* interval-product extension: on linear orders, multiply family values over
  the positive part of the element's signed interval profile (requires
  divisibility, and is then refinement-independent);
* generator-sum extension: same positive part, but summing generators and
  exponentiating once (requires additivity; dissipativity makes the result
  a contraction).

The signed interval profile of a word ("cover") is invariant under the
rewrite rules, which is what makes the last two well-defined on the group.
"""

from dataclasses import dataclass

import numpy as np

from . import linops, rewrite
from .dynamics import GeneratorFamily, LinearOrderGraph, check_additivity, \
    check_divisibility, check_identity_axiom
from .errors import PreconditionError, StructureError
from .linops import spectral_norm
from .reports import CheckReport


@dataclass(frozen=True)
class CoverFunction:
    """Canonical integer step function on a linear order.

    Segments are (left_index, right_index, coeff) with left < right, nonzero
    integer coeff, pairwise disjoint, sorted; adjacent segments sharing a
    boundary carry distinct coeffs.  Values live on node indices: the
    half-open segment [l, r) covers nodes l .. r-1.
    """

    graph: LinearOrderGraph
    segments: tuple

    def value_at(self, index):
        for (l, r, c) in self.segments:
            if l <= index < r:
                return c
        return 0

    def positive_support_indices(self):
        out = set()
        for (l, r, c) in self.segments:
            if c > 0:
                out.update(range(l, r))
        return out

    def __add__(self, other):
        if other.graph is not self.graph and other.graph.nodes != self.graph.nodes:
            raise StructureError("covers live on different grids")
        m = len(self.graph.nodes)
        values = [self.value_at(i) + other.value_at(i) for i in range(m)]
        return CoverFunction(self.graph, _canonical_segments(values))

    def as_segment_dicts(self):
        """JSON-facing dump: endpoints as node keys."""
        nodes = self.graph.nodes
        return [{"left": _plain(nodes[l]), "right": _plain(nodes[r]), "coeff": int(c)}
                for (l, r, c) in self.segments]


def _plain(key):
    return key.item() if hasattr(key, "item") else key


def _canonical_segments(values):
    """Merge a per-index value list into maximal constant nonzero segments."""
    segments = []
    start = None
    cur = 0
    for i, v in enumerate(list(values) + [0]):
        if v == cur:
            continue
        if cur != 0:
            segments.append((start, i, cur))
        start, cur = i, v
    return tuple(segments)


def cover_of_word(graph, w):
    """Signed interval profile of a word: each letter (u, v) sweeps +1 over
    [u, v) when u precedes v, -1 over [v, u) when v precedes u, and nothing
    on loops.  Invariant under every rewrite rule."""
    if not isinstance(graph, LinearOrderGraph):
        raise StructureError("covers need a linearly ordered graph")
    m = len(graph.nodes)
    diff = [0] * (m + 1)
    letters = w.letters if isinstance(w, rewrite.GroupElement) else w
    for letter in letters:
        iu = graph.index(letter.tail)
        iv = graph.index(letter.head)
        diff[iu] += 1
        diff[iv] -= 1
    values = []
    acc = 0
    for i in range(m):
        acc += diff[i]
        values.append(acc)
    return CoverFunction(graph, _canonical_segments(values))


@dataclass(frozen=True)
class Refinement:
    """A cover rewritten as coefficients over consecutive breakpoint intervals.

    breakpoints are strictly increasing node indices; coeffs[i] is the cover
    value on [breakpoints[i], breakpoints[i+1]) and zeros are retained.
    """

    graph: LinearOrderGraph
    breakpoints: tuple
    coeffs: tuple

    def intervals(self):
        nodes = self.graph.nodes
        for i, c in enumerate(self.coeffs):
            yield (nodes[self.breakpoints[i]], nodes[self.breakpoints[i + 1]], c)

    def reproduces(self, cov):
        """Pointwise equality with a cover over the whole grid."""
        m = len(self.graph.nodes)
        for x in range(m):
            val = 0
            for i, c in enumerate(self.coeffs):
                if self.breakpoints[i] <= x < self.breakpoints[i + 1]:
                    val = c
                    break
            if val != cov.value_at(x):
                return False
        return True


def refine(cov, extra_nodes=()):
    """Refinement whose breakpoints include all segment endpoints plus the
    given extra nodes; reproduces the cover pointwise."""
    graph = cov.graph
    points = set()
    for (l, r, _) in cov.segments:
        points.update((l, r))
    for u in extra_nodes:
        points.add(graph.index(u))
    bps = tuple(sorted(points))
    if len(bps) < 2:
        return Refinement(graph, bps, ())
    coeffs = tuple(cov.value_at(bps[i]) for i in range(len(bps) - 1))
    return Refinement(graph, bps, coeffs)


# -- the three extensions ------------------------------------------------------


class NormalFormExtension:
    """Letter-by-letter product along normal forms.

    Family values are used on true edges; reversed or otherwise non-edge
    letters of the closed relation contribute the identity.
    """

    kind = "normal-form"

    def __init__(self, fam, tol=1e-10, check=True):
        self.fam = fam
        self.dim = fam.dim
        if check:
            rep = check_identity_axiom(fam, tol)
            if not rep.passed:
                raise PreconditionError("identity", f"identity axiom fails: {rep.max_defect:.3e}")

    def __call__(self, g):
        out = linops.eye(self.dim)
        for letter in g.letters:
            if self.fam.graph.has_edge(letter.tail, letter.head):
                out = out @ self.fam((letter.tail, letter.head))
        return out


class FirstCoverExtension:
    """Ordered product of family values over the positive intervals of the
    cover; well-defined because divisibility collapses refinements."""

    kind = "first-cover"

    def __init__(self, fam, tol=1e-9, check=True, rng=None, sample=None):
        if not isinstance(fam.graph, LinearOrderGraph):
            raise StructureError("cover extensions need a linearly ordered graph")
        self.fam = fam
        self.dim = fam.dim
        self.tol = tol
        if check:
            rep = check_identity_axiom(fam, tol)
            if not rep.passed:
                raise PreconditionError("identity", f"identity axiom fails: {rep.max_defect:.3e}")
            rep = check_divisibility(fam, tol, rng=rng, count=sample)
            if not rep.passed:
                raise PreconditionError(
                    "divisibility",
                    f"divisibility defect {rep.max_defect:.3e} at {rep.argmax} "
                    f"exceeds {tol:.1e}; the interval product would be ill-defined",
                )

    def evaluate(self, g, extra=()):
        cov = cover_of_word(self.fam.graph, g)
        out = linops.eye(self.dim)
        for (left, right, c) in refine(cov, extra).intervals():
            if c > 0:
                out = out @ self.fam((left, right))
        return out

    def __call__(self, g, extra=(), verify=False):
        out = self.evaluate(g, extra)
        if verify:
            finest = self.evaluate(g, self.fam.graph.nodes)
            if spectral_norm(out - finest) > 1e-12 + 10 * len(self.fam.graph.nodes) * self.tol:
                raise PreconditionError(
                    "divisibility", "refinement changed the interval product")
        return out


class SecondCoverExtension:
    """Sum generators over the positive intervals of the cover, then
    exponentiate; additivity makes the sum refinement-independent and
    positive combinations of dissipative generators stay dissipative."""

    kind = "second-cover"

    def __init__(self, gen, tol=1e-9, check=True, rng=None, sample=None):
        if not isinstance(gen, GeneratorFamily):
            raise StructureError("the generator-sum extension needs a GeneratorFamily")
        if not isinstance(gen.graph, LinearOrderGraph):
            raise StructureError("cover extensions need a linearly ordered graph")
        self.gen = gen
        self.fam = gen
        self.dim = gen.dim
        self.tol = tol
        if check:
            rep = check_additivity(gen, tol, rng=rng, count=sample)
            if not rep.passed:
                raise PreconditionError(
                    "additivity",
                    f"additivity defect {rep.max_defect:.3e} at {rep.argmax} "
                    f"exceeds {tol:.1e}",
                )
            if gen.dissipative_flag:
                rep = gen.check_dissipative(tol=self.tol)
                if not rep.passed:
                    raise PreconditionError(
                        "dissipativity",
                        f"generator at {rep.argmax} is not dissipative "
                        f"({rep.max_defect:.3e})",
                    )

    def generator_of(self, g, extra=()):
        cov = cover_of_word(self.gen.graph, g)
        out = np.zeros((self.dim, self.dim), dtype=complex)
        for (left, right, c) in refine(cov, extra).intervals():
            if c > 0:
                out = out + self.gen((left, right))
        return out

    def __call__(self, g, extra=()):
        return linops.expm(self.generator_of(g, extra))


def normal_form_extension(fam, g):
    return _handle(fam, NormalFormExtension)(g)


def first_cover_extension(fam, g, extra=(), verify=True):
    return _handle(fam, FirstCoverExtension)(g, extra, verify=verify)


def second_cover_extension(gen, g, extra=()):
    handle = _handle(gen, SecondCoverExtension)
    a = handle.generator_of(g, extra)
    return a, linops.expm(a)


def _handle(fam, cls):
    cache = fam.__dict__.setdefault("_extension_handles", {})
    handle = cache.get(cls.kind)
    if handle is None:
        handle = cls(fam)
        cache[cls.kind] = handle
    return handle


# -- continuity modulus ---------------------------------------------------------

def continuity_modulus_check(ext, ell, e, e_prime, gh_pairs, xis, tol=1e-10):
    """Two-sided translate modulus against the analytic bound.

    For every sampled pair (g, h) and unit vector xi the difference
    ``(ext(g * edge' * h) - ext(g * edge * h)) xi`` must stay below the
    four-corner bound: with m/M the meet/join of the two tails/heads, the
    corner lengths are l(m,u'), l(v',M), l(v,M), l(m,u); the interval-product
    extension pays expm1 of each corner, the generator-sum extension pays
    the corner lengths themselves.
    """
    graph = ext.fam.graph
    ctx = graph.context()
    (u0, v0), (u1, v1) = e, e_prime
    m = graph.meet(u0, u1)
    big = graph.join(v0, v1)
    corners = [(m, u1), (v1, big), (v0, big), (m, u0)]
    lengths = [ell(c) for c in corners]
    if ext.kind == "first-cover":
        bound = float(sum(np.expm1(x) for x in lengths))
    elif ext.kind == "second-cover":
        bound = float(sum(lengths))
    else:
        raise StructureError("continuity bounds exist for the cover extensions only")
    ge = rewrite.embed_edge(ctx, e)
    ge_prime = rewrite.embed_edge(ctx, e_prime)
    worst, arg, offenders = -np.inf, None, []
    n = 0
    for (g, h) in gh_pairs:
        left = rewrite.gmul(rewrite.gmul(g, ge_prime), h)
        right = rewrite.gmul(rewrite.gmul(g, ge), h)
        delta = ext(left) - ext(right)
        for xi in xis:
            xi = np.asarray(xi, dtype=complex)
            xi = xi / np.linalg.norm(xi)
            excess = float(np.linalg.norm(delta @ xi)) - bound
            n += 1
            if excess > tol:
                offenders.append(((g.letters, h.letters), excess))
            if excess > worst:
                worst, arg = excess, (g.letters, h.letters)
    return CheckReport("continuity-modulus", not offenders, max(worst, 0.0),
                       tol, arg, count=n, offenders=offenders[:10],
                       details={"bound": bound, "signed_excess": worst,
                                "edge": list(e), "edge_prime": list(e_prime)})
