"""Dilations: channels and their Kraus forms, reflection dilations of single
channels, unitary group-representation dilations of channel families, and
shift dilations of contraction families on groups, composed into the three
end-to-end pipelines (discrete / divisible-continuous / generator-continuous)
plus the CPTP variant of the discrete one.

Group-indexed carrier spaces are never materialized: vectors over the group
are finitely supported tag/payload lists with lazy evaluation, so every
identity that is pointwise can be checked exactly or numerically.
"""

import threading
from dataclasses import dataclass, field

import numpy as np

from . import linops, rewrite
from .dynamics import GeneratorFamily, LinearOrderGraph, check_geometric_growth
from .errors import (GraphError, InputError, NotCPTPError, PreconditionError,
                     StructureError)
from .extend import (FirstCoverExtension, NormalFormExtension,
                     SecondCoverExtension, continuity_modulus_check)
from .linops import dagger, eye, spectral_norm, trace_norm
from .reports import CheckReport


# -- channels -------------------------------------------------------------------

class PureState:
    """Unit vector together with its rank-1 projector."""

    def __init__(self, vector, tol=1e-10):
        v = np.asarray(vector, dtype=complex).reshape(-1)
        nrm = np.linalg.norm(v)
        if abs(nrm - 1.0) > tol:
            raise InputError(f"state vector has norm {nrm}, expected 1")
        self.vector = v
        self.dim = v.size

    @property
    def matrix(self):
        return np.outer(self.vector, np.conj(self.vector))


class Channel:
    """A CPTP map, stored as a Choi matrix plus an optional Kraus list.

    Choi convention (fixed globally): ``choi = sum_ij Phi(E_ij) (x) E_ij``
    over matrix units, output factor first.  Complete positivity = the Choi
    matrix is PSD; trace preservation = its partial trace over the output
    factor is the identity.
    """

    def __init__(self, dim, choi, kraus=None, tol=1e-10, validate=True):
        self.dim = int(dim)
        self.choi = linops.as_matrix(choi)
        self.kraus = None if kraus is None else [linops.as_matrix(k) for k in kraus]
        if self.choi.shape != (self.dim**2, self.dim**2):
            raise NotCPTPError(f"Choi matrix has shape {self.choi.shape}")
        if validate:
            self.validate(tol)

    def validate(self, tol=1e-10):
        d = self.dim
        if not linops.is_psd(self.choi, tol):
            raise NotCPTPError("Choi matrix is not positive semidefinite")
        tp = spectral_norm(linops.partial_trace_first(self.choi, d, d) - eye(d))
        if tp > tol:
            raise NotCPTPError(f"trace-preservation defect {tp:.3e}")
        if self.kraus is not None:
            norm_defect = spectral_norm(
                sum(dagger(k) @ k for k in self.kraus) - eye(d))
            if norm_defect > tol:
                raise NotCPTPError(f"Kraus normalization defect {norm_defect:.3e}")
            rec = max(spectral_norm(self._apply_kraus(s) - self._apply_choi(s))
                      for s in _matrix_units(d))
            if rec > tol:
                raise NotCPTPError(f"Kraus/Choi mismatch {rec:.3e}")

    def _apply_choi(self, s):
        d = self.dim
        return np.einsum("aibj,ij->ab", self.choi.reshape(d, d, d, d),
                         np.asarray(s, dtype=complex))

    def _apply_kraus(self, s):
        s = np.asarray(s, dtype=complex)
        return sum(k @ s @ dagger(k) for k in self.kraus)

    def apply(self, s):
        if self.kraus is not None:
            return self._apply_kraus(s)
        return self._apply_choi(s)

    def superop(self):
        """The channel as a column-stacking superoperator matrix."""
        d = self.dim
        m = np.empty((d * d, d * d), dtype=complex)
        for j, u in enumerate(_matrix_units_colstack(d)):
            m[:, j] = linops.vec(self.apply(u))
        return linops.SuperOp(d, m)

    @classmethod
    def from_kraus(cls, kraus_ops, tol=1e-10):
        ks = [np.asarray(k, dtype=complex) for k in kraus_ops]
        d = ks[0].shape[0]
        choi = _choi_of_apply(lambda s: sum(k @ s @ dagger(k) for k in ks), d)
        return cls(d, choi, kraus=ks, tol=tol)

    @classmethod
    def from_apply(cls, apply_fn, dim, tol=1e-10):
        return cls(dim, _choi_of_apply(apply_fn, dim), tol=tol)

    @classmethod
    def from_superop(cls, sop, tol=1e-10):
        return cls.from_apply(sop.apply, sop.dim, tol=tol)

    @classmethod
    def identity(cls, d):
        return cls.from_kraus([eye(d)])

    @classmethod
    def from_unitary(cls, u):
        return cls.from_kraus([np.asarray(u, dtype=complex)])

    @classmethod
    def depolarizing(cls, d):
        """s -> tr(s) 1/d."""
        ks = []
        for i in range(d):
            for j in range(d):
                k = np.zeros((d, d), dtype=complex)
                k[i, j] = d**-0.5
                ks.append(k)
        return cls.from_kraus(ks)

    @classmethod
    def random(cls, rng, d, k=None):
        from .sampling import random_kraus_ops
        return cls.from_kraus(random_kraus_ops(rng, d, k))

    def compose(self, other, tol=1e-10):
        """Composition self after other (apply ``other`` first)."""
        if self.dim != other.dim:
            raise InputError("channel dimensions differ")
        return Channel.from_apply(lambda s: self.apply(other.apply(s)),
                                  self.dim, tol=tol)


def _matrix_units(d):
    for i in range(d):
        for j in range(d):
            u = np.zeros((d, d), dtype=complex)
            u[i, j] = 1.0
            yield u


def _matrix_units_colstack(d):
    """Matrix units ordered so that vec(unit_j) = e_j (column-stacking)."""
    for j in range(d):
        for i in range(d):
            u = np.zeros((d, d), dtype=complex)
            u[i, j] = 1.0
            yield u


def _choi_of_apply(apply_fn, d):
    choi = np.zeros((d * d, d * d), dtype=complex)
    for i in range(d):
        for j in range(d):
            u = np.zeros((d, d), dtype=complex)
            u[i, j] = 1.0
            choi += linops.tensor(apply_fn(u), u)
    return choi


def kraus_from_choi(ch, tol=1e-12):
    """Kraus list from the Choi eigendecomposition.

    Eigenvalues above ``tol`` relative to the largest one are kept; the count
    never exceeds dim^2, and reconstruction plus normalization are rechecked
    by the returned channel's validator.
    """
    d = ch.dim
    if not linops.is_psd(ch.choi, 1e-10):
        raise NotCPTPError("Choi matrix is not PSD; cannot extract Kraus operators")
    w, v = np.linalg.eigh(linops.hermitian_part(ch.choi))
    cutoff = tol * max(w.max(), 1.0)
    ks = []
    for lam, col in zip(w, v.T):
        if lam > cutoff:
            ks.append(np.sqrt(lam) * col.reshape(d, d))
    return Channel(ch.dim, ch.choi, kraus=ks)


def isometric_partition(ch, tol=1e-12):
    """Canonical isometry v and the isometric partition {v_i} over the
    channel's Kraus list: v maps xi to the stack of K_i xi tagged by i, and
    v_i embeds xi into slot i.  The identities v*v = 1, v_j* v_i = delta 1,
    sum v_i v_i* = 1 and K_i* = v* v_i are all verified before returning.
    """
    if ch.kraus is None:
        ch = kraus_from_choi(ch)
    ks = ch.kraus
    d, k = ch.dim, len(ks)
    v = np.transpose(np.stack(ks, axis=0), (1, 0, 2)).reshape(d * k, d)
    parts = []
    for i in range(k):
        e_i = np.zeros((k, 1), dtype=complex)
        e_i[i, 0] = 1.0
        parts.append(linops.tensor(eye(d), e_i))
    checks = [spectral_norm(dagger(v) @ v - eye(d))]
    for i, vi in enumerate(parts):
        checks.append(spectral_norm(dagger(v) @ vi - dagger(ks[i])))
        for j, vj in enumerate(parts):
            target = eye(d) if i == j else np.zeros((d, d))
            checks.append(spectral_norm(dagger(vj) @ vi - target))
    checks.append(spectral_norm(sum(vi @ dagger(vi) for vi in parts) - eye(d * k)))
    worst = max(checks)
    if worst > tol:
        raise NotCPTPError(f"isometric partition identities fail by {worst:.3e}")
    return v, parts


@dataclass
class KrausDilation:
    """Unitary (reflection) dilation of a single channel: the environment is
    the system space direct-summed with system (x) C^k, the state is a pure
    state in the first summand, and tracing the environment out of the
    conjugated product state reproduces the channel."""

    dim: int
    env_dim: int
    unitary: np.ndarray
    state: PureState

    def reconstructed(self, s):
        big = linops.tensor(np.asarray(s, dtype=complex), self.state.matrix)
        return linops.partial_trace_second(
            linops.adjoint_action(self.unitary, big), self.dim, self.env_dim)

    def verify(self, ch, tol=1e-10):
        u = self.unitary
        n = u.shape[0]
        defects = {
            "unitary": spectral_norm(u @ dagger(u) - eye(n)),
            "self_adjoint": spectral_norm(u - dagger(u)),
            "squares_to_identity": spectral_norm(u @ u - eye(n)),
            "reconstruction": max(
                trace_norm(self.reconstructed(s) - ch.apply(s))
                for s in _matrix_units(self.dim)),
        }
        worst = max(defects.values())
        return CheckReport("reflection-dilation", worst <= tol, worst, tol,
                           details=defects)


def kraus_ii_dilation(ch, xi=None, pad_to=None):
    """Reflection dilation of a channel with environment H + H (x) C^k.

    The coupling isometry stacks ``K_i (x) slot_i``; the block operator
    [[0, D*], [D, 1 - D D*]] is then a self-adjoint unitary.  ``xi`` is the
    system-space unit vector whose embedding into the first environment
    summand serves as the pure environment state.  ``pad_to`` zero-pads the
    Kraus list so families of channels can share one environment.
    """
    if ch.kraus is None:
        ch = kraus_from_choi(ch)
    d = ch.dim
    ks = list(ch.kraus)
    if pad_to is not None:
        if pad_to < len(ks):
            raise InputError(f"cannot pad {len(ks)} Kraus operators to {pad_to}")
        ks = ks + [np.zeros((d, d), dtype=complex)] * (pad_to - len(ks))
    k = len(ks)
    if xi is None:
        xi = np.zeros(d)
        xi[0] = 1.0
    xi = np.asarray(xi, dtype=complex)
    if abs(np.linalg.norm(xi) - 1.0) > 1e-10 or xi.size != d:
        raise InputError("xi must be a unit vector in the system space")

    env = d + d * k
    # D : system (x) system -> system (x) (system (x) C^k)
    dmat = np.zeros((d * d * k, d * d), dtype=complex)
    for i, ki in enumerate(ks):
        e_i = np.zeros((k, 1), dtype=complex)
        e_i[i, 0] = 1.0
        dmat += linops.tensor(ki, linops.tensor(eye(d), e_i))
    iota1 = np.zeros((env, d), dtype=complex)
    iota1[:d, :] = eye(d)
    iota2 = np.zeros((env, d * k), dtype=complex)
    iota2[d:, :] = eye(d * k)
    emb1 = linops.tensor(eye(d), iota1)      # system (x) system -> system (x) env
    emb2 = linops.tensor(eye(d), iota2)
    u0 = (emb1 @ dagger(dmat) @ dagger(emb2)
          + emb2 @ dmat @ dagger(emb1)
          + emb2 @ (eye(d * d * k) - dmat @ dagger(dmat)) @ dagger(emb2))
    state = PureState(iota1 @ xi)
    return KrausDilation(d, env, u0, state)


# -- unitary representation dilation of a channel family ------------------------

@dataclass(frozen=True)
class FormalVector:
    """Finitely supported vector over the group: (tag, payload) terms.

    Terms with equal tags are merged on construction.
    """

    terms: tuple

    @classmethod
    def of(cls, terms):
        merged = {}
        for tag, payload in terms:
            payload = np.asarray(payload, dtype=complex)
            if tag in merged:
                merged[tag] = merged[tag] + payload
            else:
                merged[tag] = payload
        return cls(tuple(merged.items()))

    def map(self, fn):
        return FormalVector.of(fn(tag, payload) for tag, payload in self.terms)

    def __add__(self, other):
        return FormalVector.of(self.terms + other.terms)

    def distance(self, other):
        tags = {t for t, _ in self.terms} | {t for t, _ in other.terms}
        a = dict(self.terms)
        b = dict(other.terms)
        total = 0.0
        for t in tags:
            pa = a.get(t)
            pb = b.get(t)
            if pa is None:
                total += float(np.linalg.norm(pb))
            elif pb is None:
                total += float(np.linalg.norm(pa))
            else:
                total += float(np.linalg.norm(pa - pb))
        return total


class VedDilation:
    """Unitary representation dilating a group-indexed CPTP family.

    Each element gets a reflection dilation on one shared environment (Kraus
    lists zero-padded to a common length); the representation acts on
    finitely supported vectors over the group by
    ``(tag, payload) -> (x * tag, u(x * tag) u(tag)* payload)``, which
    satisfies the representation law exactly at the tag level.
    """

    def __init__(self, assignment, dim, kraus_slots=None, xi=None, tol=1e-10):
        self.assignment = assignment
        self.dim = int(dim)
        self.k = self.dim**2 if kraus_slots is None else int(kraus_slots)
        self.env_dim = self.dim * (self.k + 1)
        if xi is None:
            xi = np.zeros(self.dim)
            xi[0] = 1.0
        self.xi = np.asarray(xi, dtype=complex)
        ident = assignment(rewrite.identity())
        defect = max(spectral_norm(ident.apply(s) - s)
                     for s in _matrix_units(self.dim))
        if defect > tol:
            raise InputError(
                f"assignment at the group identity deviates from the identity "
                f"channel by {defect:.3e}")
        iota1 = np.zeros((self.env_dim, self.dim), dtype=complex)
        iota1[:self.dim, :] = eye(self.dim)
        self.base_state = PureState(iota1 @ self.xi)
        self._unitaries = {rewrite.identity(): eye(self.dim * self.env_dim)}
        self._lock = threading.Lock()

    def unitary_of(self, x):
        u = self._unitaries.get(x)
        if u is None:
            ch = self.assignment(x)
            if ch.kraus is None:
                ch = kraus_from_choi(ch)
            if len(ch.kraus) > self.k:
                raise InputError(
                    f"channel at {x!r} has {len(ch.kraus)} Kraus operators; "
                    f"the shared environment allows {self.k}")
            u = kraus_ii_dilation(ch, self.xi, pad_to=self.k).unitary
            with self._lock:
                u = self._unitaries.setdefault(x, u)
        return u

    def apply(self, x, v):
        """The representation on finitely supported vectors."""
        def term(tag, payload):
            new_tag = rewrite.gmul(x, tag)
            return new_tag, self.unitary_of(new_tag) @ dagger(self.unitary_of(tag)) @ payload
        return v.map(term)

    def verify_element(self, x, s, tol=1e-10):
        """Trace-norm defect between the dilated action at ``x`` and the
        assigned channel, computed on the finite support the product state
        actually occupies (the group-identity slot)."""
        p = self.dim * self.env_dim
        m = linops.tensor(np.asarray(s, dtype=complex), self.base_state.matrix)
        x_inv = rewrite.ginv(x)
        one = rewrite.identity()
        cols = np.empty((p, p), dtype=complex)
        for j in range(p):
            e_j = np.zeros(p, dtype=complex)
            e_j[j] = 1.0
            back = self.apply(x_inv, FormalVector.of([(x, e_j)]))
            (tag, payload), = back.terms
            if tag != one:
                raise GraphError("support tracking failed in verify_element")
            fwd = self.apply(x, FormalVector.of([(one, m @ payload)]))
            (tag, payload), = fwd.terms
            if tag != x:
                raise GraphError("support tracking failed in verify_element")
            cols[:, j] = payload
        reduced = linops.partial_trace_second(cols, self.dim, self.env_dim)
        return trace_norm(reduced - self.assignment(x).apply(s))


def ved_dilation(assignment, dim, kraus_slots=None, xi=None):
    return VedDilation(assignment, dim, kraus_slots=kraus_slots, xi=xi)


def ved_apply(dil, x, v):
    return dil.apply(x, v)


def ved_verify(dil, x, s, tol=1e-10):
    return dil.verify_element(x, s, tol)


# -- shift dilation of contraction families on groups ---------------------------

class ShiftDilation:
    """Right-shift dilation of a contraction family indexed by a group.

    Vectors of the dilation space are finitely supported (tag, payload)
    lists; ``evaluate(v, g)`` applies the family at shifted tags and sums.
    The maps are: r embeds a payload at the identity tag, U(x) left-shifts
    tags, j evaluates at the identity.  Then j U(x) r reproduces the family
    and U is a representation, exactly at the tag level.

    Flavors: "banach" (payloads are vectors, values act by matrix product)
    and "cstar" (payloads are square matrices, values act as superoperators,
    and elements can be multiplied pointwise as formal products).
    """

    def __init__(self, phi_bar, dim, flavor="banach", tol=1e-10):
        if flavor not in ("banach", "cstar"):
            raise InputError(f"unknown flavor {flavor!r}")
        self.flavor = flavor
        self.dim = int(dim)  # payload dimension: vector length or matrix size
        self.tol = tol
        self._phi = phi_bar
        self._values = {}
        self._lock = threading.Lock()

    def value(self, g):
        val = self._values.get(g)
        if val is None:
            val = np.asarray(self._phi(g), dtype=complex)
            if self.flavor == "banach":
                if val.shape != (self.dim, self.dim):
                    raise InputError(f"family value has shape {val.shape}")
                if spectral_norm(val) > 1.0 + self.tol:
                    raise PreconditionError(
                        "contraction",
                        f"family value at {g!r} has norm {spectral_norm(val):.6f}")
            else:
                if val.shape != (self.dim**2, self.dim**2):
                    raise InputError(f"superoperator value has shape {val.shape}")
                unital = spectral_norm(
                    linops.unvec(val @ linops.vec(eye(self.dim)), self.dim)
                    - eye(self.dim))
                if unital > self.tol:
                    raise PreconditionError(
                        "unitality",
                        f"family value at {g!r} has unitality defect {unital:.3e}")
            with self._lock:
                val = self._values.setdefault(g, val)
        return val

    def _act(self, g, payload):
        val = self.value(g)
        if self.flavor == "banach":
            return val @ payload
        return linops.unvec(val @ linops.vec(payload), self.dim)

    # Banach flavor: FormalVector; cstar flavor: tuple of FormalVector factors.

    def embed(self, payload):
        v = FormalVector.of([(rewrite.identity(), payload)])
        return (v,) if self.flavor == "cstar" else v

    def shift(self, x, v):
        if isinstance(v, tuple):
            return tuple(self.shift(x, f) for f in v)
        return v.map(lambda tag, payload: (rewrite.gmul(x, tag), payload))

    def evaluate(self, v, g):
        if isinstance(v, tuple):
            out = eye(self.dim)
            for factor in v:
                out = out @ self.evaluate(factor, g)
            return out
        total = None
        for tag, payload in v.terms:
            term = self._act(rewrite.gmul(g, tag), payload)
            total = term if total is None else total + term
        if total is None:
            shape = (self.dim, self.dim) if self.flavor == "cstar" else (self.dim,)
            total = np.zeros(shape, dtype=complex)
        return total

    def compress(self, v):
        return self.evaluate(v, rewrite.identity())

    def multiply(self, a, b):
        """Pointwise product of formal elements (cstar flavor only)."""
        if self.flavor != "cstar":
            raise StructureError("formal products exist in the cstar flavor only")
        return tuple(a) + tuple(b)

    def compression_matrix(self, x):
        """The matrix of payload -> compress(shift(x, embed(payload)))."""
        n = self.dim if self.flavor == "banach" else self.dim**2
        out = np.empty((n, n), dtype=complex)
        for idx in range(n):
            if self.flavor == "banach":
                payload = np.zeros(n, dtype=complex)
                payload[idx] = 1.0
                col = self.compress(self.shift(x, self.embed(payload)))
                out[:, idx] = col
            else:
                payload = linops.unvec(_unit_vec(n, idx), self.dim)
                col = self.compress(self.shift(x, self.embed(payload)))
                out[:, idx] = linops.vec(col)
        return out

    def check_embedding(self, samples):
        """Sampled structure of the embedding map r.

        Banach flavor: r is isometric on payloads by construction (tags carry
        the payload untouched), so j r = 1 is checked.  Cstar flavor: r is
        checked to be unital and positivity-preserving on the samples.
        """
        worst = 0.0
        if self.flavor == "banach":
            for payload in samples:
                out = self.compress(self.embed(payload))
                worst = max(worst, float(np.linalg.norm(out - payload)))
            name = "embedding-section"
        else:
            unit = self.compress(self.embed(eye(self.dim)))
            worst = spectral_norm(unit - eye(self.dim))
            for payload in samples:
                p = np.asarray(payload, dtype=complex)
                p = p @ dagger(p)  # positive sample
                for g in list(self._values.keys())[:8] or [rewrite.identity()]:
                    val = self.evaluate(self.embed(p), g)
                    lam = float(np.linalg.eigvalsh(linops.hermitian_part(val)).min())
                    worst = max(worst, -min(lam, 0.0),
                                spectral_norm(val - dagger(val)))
            name = "embedding-positive-unital"
        return CheckReport(name, worst <= 10 * self.tol, worst, 10 * self.tol,
                           count=len(samples))


def _unit_vec(n, idx):
    v = np.zeros(n, dtype=complex)
    v[idx] = 1.0
    return v


def stroescu_dilation(phi_bar, dim, flavor="banach", tol=1e-10):
    """Shift dilation of a group-indexed contraction family with
    ``phi_bar(identity) = 1``; see :class:`ShiftDilation`."""
    return ShiftDilation(phi_bar, dim, flavor=flavor, tol=tol)


# -- pipelines -------------------------------------------------------------------

@dataclass
class DilatedSystem:
    label: str
    system: dict
    extension: object
    dilation: object
    context: object
    reports: list = field(default_factory=list)

    def edge_element(self, e):
        return rewrite.embed_edge(self.context, e)

    def edge_operator(self, e):
        """Compression of the dilated representation at an edge."""
        return self.dilation.compression_matrix(self.edge_element(e))

    def verify(self, rng=None, tol=1e-10, max_edges=None, xis=None):
        reports = []
        graph = self.system["graph"]
        nodes = graph.nodes
        bad = [u for u in nodes
               if not self.edge_element((u, u)).is_identity()]
        reports.append(CheckReport("group-identity-axiom", not bad,
                                   float(len(bad)), 0.0, offenders=bad[:10],
                                   count=len(nodes)))
        triples = [(u, v, w)
                   for i, u in enumerate(nodes)
                   for j, v in enumerate(nodes[i:], i)
                   for w in nodes[j:]
                   if graph.has_edge(u, v) and graph.has_edge(v, w)]
        if rng is not None and len(triples) > 200:
            idx = rng.choice(len(triples), size=200, replace=False)
            triples = [triples[i] for i in idx]
        bad = []
        for (u, v, w) in triples:
            lhs = rewrite.gmul(self.edge_element((u, v)), self.edge_element((v, w)))
            if lhs != self.edge_element((u, w)):
                bad.append((u, v, w))
        reports.append(CheckReport("group-divisibility-axiom", not bad,
                                   float(len(bad)), 0.0, offenders=bad[:10],
                                   count=len(triples)))
        reports.append(self._compression_report(tol, max_edges))
        if self.label in ("B", "C") and self.system.get("ell") is not None:
            reports.append(self._continuity_report(rng, xis))
        self.reports = reports
        return reports

    def _compression_report(self, tol, max_edges):
        graph = self.system["graph"]
        fam = self.system["family"]
        edges = list(graph.edges())
        if max_edges is not None and len(edges) > max_edges:
            edges = edges[:max_edges]
        worst, arg = 0.0, None
        if self.label == "A-cptp":
            channels = self.system["channels"]
            for e in edges:
                g = self.edge_element(e)
                defect = max(self.dilation.verify_element(g, s)
                             for s in _matrix_units(self.dilation.dim))
                direct = max(
                    trace_norm(self.extension_channel(g).apply(s)
                               - channels(e).apply(s))
                    for s in _matrix_units(self.dilation.dim))
                defect = max(defect, direct)
                if defect > worst:
                    worst, arg = defect, e
            return CheckReport("dilation-reconstruction", worst <= tol, worst,
                               tol, arg, count=len(edges))
        for e in edges:
            defect = spectral_norm(self.edge_operator(e) - fam(e))
            if defect > worst:
                worst, arg = defect, e
        return CheckReport("compression-identity", worst <= tol, worst, tol,
                           arg, count=len(edges))

    def extension_channel(self, g):
        assignment = getattr(self.dilation, "assignment", None)
        if assignment is None:
            raise StructureError("not a channel-family dilation")
        return assignment(g)

    def _continuity_report(self, rng, xis):
        graph = self.system["graph"]
        ell = self.system["ell"]
        ext = self.extension
        expected = "second-cover" if self.label == "C" else "first-cover"
        if ext.kind != expected:
            raise StructureError("extension/pipeline mismatch")
        rng = rng or np.random.default_rng(0)
        ctx = self.context
        nodes = graph.nodes
        n = self.extension.fam.dim
        if xis is None:
            xis = [rng.standard_normal(n) + 1j * rng.standard_normal(n)
                   for _ in range(3)]
        pairs = [(rewrite.random_element(ctx, rng, 3),
                  rewrite.random_element(ctx, rng, 3)) for _ in range(5)]
        idx = rng.integers(0, len(nodes) - 1, size=4)
        worst = CheckReport("continuity-modulus", True, 0.0, 0.0)
        for i in idx:
            e = (nodes[i], nodes[i + 1])
            e2 = (nodes[max(i - 1, 0)], nodes[min(i + 2, len(nodes) - 1)])
            rep = continuity_modulus_check(ext, ell, e, e2, pairs, xis)
            if not rep.passed or rep.max_defect > worst.max_defect:
                worst = rep
        return worst


def _payload_dim(fam_dim, flavor):
    if flavor == "banach":
        return fam_dim
    d = int(round(fam_dim**0.5))
    if d * d != fam_dim:
        raise InputError(
            "the cstar flavor needs superoperator-valued families "
            f"(square dimension), got {fam_dim}")
    return d


def dilate_discrete(system, flavor="banach", tol=1e-10):
    """Discrete pipeline: normal-form extension + shift dilation.  Needs the
    identity axiom only; the input family may be indivisible."""
    fam = system["family"]
    ext = NormalFormExtension(fam, tol=tol)
    dil = stroescu_dilation(ext, _payload_dim(fam.dim, flavor), flavor=flavor)
    ctx = system["graph"].context()
    return DilatedSystem("A", system, ext, dil, ctx)


def dilate_divisible(system, flavor="banach", tol=1e-9):
    """Continuous pipeline for divisible families with geometric growth:
    interval-product extension + shift dilation."""
    fam = system["family"]
    ell = system.get("ell")
    if ell is not None:
        growth = check_geometric_growth(fam, ell)
        if not growth.passed:
            raise PreconditionError(
                "geometric-growth",
                f"growth bound fails by {growth.max_defect:.3e} at {growth.argmax}")
    ext = FirstCoverExtension(fam, tol=tol)
    dil = stroescu_dilation(ext, _payload_dim(fam.dim, flavor), flavor=flavor)
    return DilatedSystem("B", system, ext, dil, system["graph"].context())


def dilate_exponential(system, flavor="banach", tol=1e-9):
    """Continuous pipeline for exponential families with additive dissipative
    generators of geometric growth: generator-sum extension + shift dilation."""
    gens = system.get("generators")
    if not isinstance(gens, GeneratorFamily):
        raise PreconditionError("generators", "pipeline C needs a generator family")
    alpha = float(system.get("alpha", 1.0))
    scaled = GeneratorFamily(gens.graph, gens.dim, lambda e: alpha * gens(e),
                             dissipative_flag=gens.dissipative_flag)
    ell = system.get("ell")
    if ell is not None:
        growth = check_geometric_growth(scaled, ell)
        if not growth.passed:
            raise PreconditionError(
                "geometric-growth",
                f"generator growth bound fails by {growth.max_defect:.3e} "
                f"at {growth.argmax}")
    ext = SecondCoverExtension(scaled, tol=tol)
    dil = stroescu_dilation(ext, _payload_dim(gens.dim, flavor), flavor=flavor)
    return DilatedSystem("C", system, ext, dil, gens.graph.context())


def dilate_cptp(system, kraus_slots=None, tol=1e-10):
    """CPTP variant of the discrete pipeline: compose channels along normal
    forms, then dilate the family through one unitary representation."""
    channels = system["channels"]
    dim = system["dim"]
    graph = system["graph"]
    ident = Channel.identity(dim)
    cache = {}

    def assignment(g):
        ch = cache.get(g)
        if ch is None:
            ch = ident
            for letter in g.letters:
                e = (letter.tail, letter.head)
                ch = ch.compose(channels(e)) if graph.has_edge(*e) else ch
            cache[g] = ch
        return ch

    dil = VedDilation(assignment, dim, kraus_slots=kraus_slots)
    ext = assignment
    return DilatedSystem("A-cptp", system, ext, dil, graph.context())


PIPELINES = {
    "A": dilate_discrete,
    "B": dilate_divisible,
    "C": dilate_exponential,
    "A-cptp": dilate_cptp,
}


# -- one-parameter factorization --------------------------------------------------

def one_param_factorization(dilsys, t0, rng=None, tol=1e-12, sg_tol=1e-10):
    """Factor the dilated two-parameter family through a one-parameter family
    anchored at ``t0``: U(t) is the dilation at the element of edge (t, t0)
    (inverted when the edge points the other way).

    Checks, in order: the two-parameter group elements factor exactly; the
    dilated operators factor on random finitely supported vectors; and the
    compressed one-parameter family satisfies (or, for memoryful systems,
    fails) the semigroup law over node pairs whose numeric sum is on the grid.
    """
    graph = dilsys.system["graph"]
    if not isinstance(graph, LinearOrderGraph):
        raise StructureError("factorization needs a linearly ordered graph")
    if not isinstance(dilsys.dilation, ShiftDilation):
        raise StructureError("factorization needs a shift-dilated system")
    ctx = dilsys.context
    rng = rng or np.random.default_rng(0)

    def g_of(t):
        if graph.has_edge(t, t0):
            return rewrite.embed_edge(ctx, (t, t0))
        return rewrite.ginv(rewrite.embed_edge(ctx, (t0, t)))

    bad = []
    pairs = [(t, s) for i, t in enumerate(graph.nodes)
             for s in graph.nodes[i:]]
    for (t, s) in pairs:
        lhs = rewrite.embed_edge(ctx, (t, s))
        rhs = rewrite.gmul(g_of(t), rewrite.ginv(g_of(s)))
        if lhs != rhs:
            bad.append((t, s))
    group_rep = CheckReport("factorization-group-level", not bad,
                            float(len(bad)), 0.0, offenders=bad[:10],
                            count=len(pairs))

    dil = dilsys.dilation
    worst_op, arg_op = 0.0, None
    sample_pairs = pairs if len(pairs) <= 24 else \
        [pairs[i] for i in rng.choice(len(pairs), size=24, replace=False)]
    for (t, s) in sample_pairs:
        n = dil.dim if dil.flavor == "banach" else dil.dim**2
        payload = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        if dil.flavor == "cstar":
            payload = linops.unvec(payload, dil.dim)
        v = dil.embed(payload)
        tag = rewrite.random_element(ctx, rng, 2)
        v = dil.shift(tag, v)
        direct = dil.shift(rewrite.embed_edge(ctx, (t, s)), v)
        factored = dil.shift(g_of(t), dil.shift(rewrite.ginv(g_of(s)), v))
        d = _formal_distance(direct, factored)
        if d > worst_op:
            worst_op, arg_op = d, (t, s)
    op_rep = CheckReport("factorization-operator-level", worst_op <= tol,
                         worst_op, tol, arg_op, count=len(sample_pairs))

    sg_max, sg_arg, sg_count = 0.0, None, 0
    numeric = all(isinstance(u, (int, float, np.floating)) for u in graph.nodes)
    if numeric:
        for t in graph.nodes:
            for s in graph.nodes:
                total = t + s
                if not graph.has_node(total) or t == t0 or s == t0:
                    continue
                sg_count += 1
                lhs = dilsys.dilation.compression_matrix(g_of(t)) \
                    @ dilsys.dilation.compression_matrix(g_of(s))
                rhs = dilsys.dilation.compression_matrix(g_of(total))
                d = spectral_norm(lhs - rhs)
                if d > sg_max:
                    sg_max, sg_arg = d, (t, s)
    sg_rep = CheckReport("one-parameter-semigroup-law", sg_max <= sg_tol,
                         sg_max, sg_tol, sg_arg, count=sg_count,
                         details={"holds": sg_max <= sg_tol})
    return [group_rep, op_rep, sg_rep]


def _formal_distance(a, b):
    if isinstance(a, tuple):
        return max(x.distance(y) for x, y in zip(a, b))
    return a.distance(b)


# -- JSON channel specs ------------------------------------------------------------

def channel_from_spec(spec):
    """{"dim": d, "repr": "choi"|"kraus", "data": matrix literal(s)}."""
    try:
        d = int(spec["dim"])
        repr_kind = spec["repr"]
        data = spec["data"]
    except (KeyError, TypeError) as exc:
        raise InputError(f"malformed channel spec: {exc}") from exc
    if repr_kind == "choi":
        return Channel(d, linops.matrix_from_literal(data))
    if repr_kind == "kraus":
        return Channel.from_kraus([linops.matrix_from_literal(k) for k in data])
    raise InputError(f"unknown channel repr {repr_kind!r}")


def channel_to_spec(ch):
    if ch.kraus is not None:
        return {"dim": ch.dim, "repr": "kraus",
                "data": [linops.matrix_to_literal(k) for k in ch.kraus]}
    return {"dim": ch.dim, "repr": "choi",
            "data": linops.matrix_to_literal(ch.choi)}
