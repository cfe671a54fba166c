"""Rings of n identical one-dimensional cells with dihedral symmetry.

A ring is described by the internal-dynamics delay profile of one cell plus
one coupling profile per neighbour distance (distance d pairs cell i with
cells i +- d; for even n the distance n/2 neighbour is the single opposite
cell).  Mirror symmetry makes the full n-by-n kernel a symmetric circulant,
so the characteristic determinant splits into scalar factors

    D_j(lam) = lam - F(lam) - G_j(lam),      j = 0 .. floor(n/2),

where F comes from the internal profile and G_j weighs each coupling
profile by 2*cos(2*pi*(k-1)*j/n) for paired neighbours and by (-1)^j for
the opposite cell.  Factor 0 appears once, factor n/2 (even n) once, all
others twice.

A direct eigendecomposition of the circulant confirms those weights.  The
printed reduced matrices that some sources carry use twice these values
(4*cos instead of 2*cos); :func:`build_B` exposes both scalings because
column scaling never changes singularity, which is the only thing the
nonsingularity tests below depend on.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .errors import BadIndex, BadParity, SingularB
from .quasipoly import CharProduct, ScalarFactor
from .realization import (
    FrequencyTarget,
    RealizationResult,
    RealizeConfig,
    WeightTable,
    realize,
)

__all__ = [
    "CouplingProfile",
    "RingSpec",
    "Edge",
    "ConnectionList",
    "EquivarianceReport",
    "validate_equivariance",
    "factor_weights",
    "characteristic_factorization",
    "build_B",
    "det_B_two_factor",
    "detect_even_degeneracy",
    "realize_ring",
    "ring_to_dict",
    "ring_from_dict",
]


# ---------------------------------------------------------------------------
# Domain types


@dataclass(frozen=True)
class CouplingProfile:
    """Finite sum of point delays: atoms (alpha, s) contribute
    alpha * x(t - s).  An empty profile means no connection."""

    atoms: tuple[tuple[float, float], ...] = ()

    def __post_init__(self):
        atoms = tuple((float(a), float(s)) for a, s in self.atoms)
        object.__setattr__(self, "atoms", atoms)
        for a, s in atoms:
            if not (s >= 0.0):
                raise ValueError(f"delay {s} is negative")
            if not np.isfinite(a) or not np.isfinite(s):
                raise ValueError("profile atoms must be finite")


@dataclass(frozen=True)
class RingSpec:
    """Cell count, internal profile, and coupling profiles keyed by the
    coupling index k (k = 2 is the nearest neighbour, distance k - 1).

    Only one representative per mirror pair is stored; valid keys are
    2 .. (n+1)//2 for odd n and 2 .. n//2 + 1 for even n.  An empty
    internal profile is allowed: realizations driven purely by coupling
    factors produce rings whose cells have no isolated dynamics.
    """

    n: int
    internal: CouplingProfile
    couplings: Mapping[int, CouplingProfile]

    def __post_init__(self):
        if self.n < 3:
            raise ValueError("ring needs at least 3 cells")
        object.__setattr__(
            self, "couplings", dict(sorted((int(k), v) for k, v in self.couplings.items()))
        )
        kmax = self.max_coupling_index
        for k in self.couplings:
            if not (2 <= k <= kmax):
                raise ValueError(f"coupling index {k} outside 2..{kmax}")

    @property
    def max_coupling_index(self) -> int:
        return (self.n + 1) // 2 if self.n % 2 else self.n // 2 + 1


@dataclass(frozen=True)
class Edge:
    """Directed connection with src/dst cells in 1..n."""

    src: int
    dst: int
    delay: float
    tag: str

    def to_dict(self) -> dict:
        return {"from": self.src, "to": self.dst, "delay": self.delay, "tag": self.tag}


@dataclass(frozen=True)
class ConnectionList:
    n: int
    edges: tuple[Edge, ...]

    def __post_init__(self):
        object.__setattr__(self, "edges", tuple(self.edges))
        for e in self.edges:
            if not (1 <= e.src <= self.n and 1 <= e.dst <= self.n):
                raise ValueError(f"edge {e} has cell index outside 1..{self.n}")


@dataclass(frozen=True)
class EquivarianceReport:
    passed: bool
    condition: str | None = None
    edge: Edge | None = None
    message: str = ""

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "condition": self.condition,
            "edge": self.edge.to_dict() if self.edge else None,
            "message": self.message,
        }


# ---------------------------------------------------------------------------
# Equivariance validation


def validate_equivariance(conns: ConnectionList) -> EquivarianceReport:
    """Check the two ring-symmetry conditions on an explicit edge list.

    (i) every cell must receive, from its relative position offsets, inputs
    identical (delay and tag) to the ones cell 1 receives; (ii) every
    connection must have an identical reverse.  Delays compare exactly:
    couplings are identical only if written identically.
    """
    n = conns.n
    per_cell: dict[int, Counter] = {i: Counter() for i in range(1, n + 1)}
    for e in conns.edges:
        per_cell[e.dst][((e.src - e.dst) % n, e.delay, e.tag)] += 1
    ref = per_cell[1]
    for i in range(2, n + 1):
        cur = per_cell[i]
        if cur == ref:
            continue
        for key in sorted(set(ref) | set(cur)):
            if ref[key] != cur[key]:
                offset, delay, tag = key
                src = (i - 1 + offset) % n + 1
                edge = Edge(src, i, delay, tag)
                kind = "missing" if cur[key] < ref[key] else "unexpected"
                return EquivarianceReport(
                    False,
                    "(i)",
                    edge,
                    f"cell {i} input from cell {src} ({kind}) breaks the orbit of cell 1",
                )
    directed = Counter((e.src, e.dst, e.delay, e.tag) for e in conns.edges)
    for (src, dst, delay, tag), count in sorted(directed.items()):
        if directed[(dst, src, delay, tag)] < count:
            return EquivarianceReport(
                False,
                "(ii)",
                Edge(src, dst, delay, tag),
                f"connection {src}->{dst} has no identical reverse",
            )
    return EquivarianceReport(True, None, None, "ring is symmetric")


# ---------------------------------------------------------------------------
# Factor weights and the characteristic product


# 2*cos(t*pi/6) at the integer angles where the cosine is rational
_EXACT_DOUBLE_COS = {0: 2.0, 2: 1.0, 3: 0.0, 4: -1.0, 6: -2.0, 8: -1.0, 9: 0.0, 10: 1.0}


def _cos_weight(n: int, m: int) -> float:
    # integer reduction keeps equal angles bitwise equal; angles that are
    # multiples of pi/6 with rational cosine come out exact (0, +-1, +-2)
    m = m % n
    if (12 * m) % n == 0:
        t = (12 * m // n) % 12
        if t in _EXACT_DOUBLE_COS:
            return _EXACT_DOUBLE_COS[t]
    return 2.0 * float(np.cos(2.0 * np.pi * m / n))


def factor_weights(n: int, j: int) -> np.ndarray:
    """Weight of each coupling profile inside factor j.

    Entry k - 2 belongs to coupling index k.  Paired neighbours carry
    2*cos(2*pi*(k-1)*j/n); for even n the last entry is the opposite-cell
    weight (-1)^j.  Symmetric in j: factor j equals factor n - j.
    """
    if n < 3:
        raise ValueError("ring needs at least 3 cells")
    if not (0 <= j <= n - 1):
        raise ValueError(f"factor index {j} outside 0..{n - 1}")
    if n % 2:
        return np.array([_cos_weight(n, (k - 1) * j) for k in range(2, (n + 1) // 2 + 1)])
    paired = [_cos_weight(n, (k - 1) * j) for k in range(2, n // 2 + 1)]
    return np.array(paired + [(-1.0) ** j])


def characteristic_factorization(ring: RingSpec) -> CharProduct:
    """Factored characteristic determinant of the ring.

    Factors are ordered j = 0 .. floor(n/2); factor 0 has multiplicity 1,
    factor n/2 (even n only) has multiplicity 1, all others 2.  Every
    factor shares the same delay list and differs only in weights, so the
    product evaluates to the determinant of the full n-by-n system.
    """
    n = ring.n
    factors = []
    for j in range(n // 2 + 1):
        weights = factor_weights(n, j)
        terms = [(a, 1.0, tau) for a, tau in ring.internal.atoms]
        for k, profile in ring.couplings.items():
            w = float(weights[k - 2])
            terms.extend((alpha, w, s) for alpha, s in profile.atoms)
        mult = 1 if j == 0 or (n % 2 == 0 and j == n // 2) else 2
        factors.append(ScalarFactor(tuple(terms), mult))
    return CharProduct(tuple(factors))


# ---------------------------------------------------------------------------
# Reduced leading-weight matrices (odd n)


def _check_odd(n: int) -> None:
    if n % 2 == 0:
        raise BadParity(f"cell count {n} must be odd here")
    if n < 3:
        raise BadIndex("cell count must be >= 3")


def _check_indices(n: int, indices: Sequence[int]) -> tuple[int, ...]:
    idx = tuple(int(i) for i in indices)
    if not idx:
        raise BadIndex("need at least one factor index")
    if any(idx[p] >= idx[p + 1] for p in range(len(idx) - 1)):
        raise BadIndex(f"indices {idx} must be strictly increasing")
    if idx[0] < 0 or idx[-1] > (n - 1) // 2:
        raise BadIndex(f"indices {idx} outside 0..{(n - 1) // 2}")
    return idx


def build_B(n: int, indices: Sequence[int], convention: float = 4.0) -> np.ndarray:
    """Reduced leading-weight matrix for a factor selection, odd n.

    Row p and column q hold the weight of factor indices[p] at the leading
    column of block q: 1 when indices[q] is 0 (the internal column),
    convention * cos(2*pi*indices[p]*indices[q]/n) otherwise.  The printed
    convention is 4; the eigen-consistent one is 2.  Singularity does not
    depend on the choice (uniform column scaling).
    """
    _check_odd(n)
    idx = _check_indices(n, indices)
    c = float(convention)
    s = len(idx)
    mat = np.empty((s, s))
    for p in range(s):
        for q in range(s):
            if idx[q] == 0:
                mat[p, q] = 1.0
            else:
                mat[p, q] = c * np.cos(2.0 * np.pi * ((idx[p] * idx[q]) % n) / n)
    return mat


def det_B_two_factor(n: int, i1: int, i2: int) -> float:
    """Closed-form determinant of the two-factor reduced matrix, printed
    convention: 8*[cos(2pi(i1^2+i2^2)/n) + cos(2pi(i1^2-i2^2)/n)
    - cos(4pi i1 i2/n) - 1].  Nonzero for all valid index pairs."""
    _check_odd(n)
    if not (1 <= i1 < i2 <= (n - 1) // 2):
        raise BadIndex(f"need 1 <= i1 < i2 <= {(n - 1) // 2}, got ({i1}, {i2})")

    def c(m: int) -> float:
        return float(np.cos(2.0 * np.pi * (m % n) / n))

    return 8.0 * (c(i1 * i1 + i2 * i2) + c(i1 * i1 - i2 * i2) - c(2 * i1 * i2) - 1.0)


def detect_even_degeneracy(n: int) -> list[tuple[int, int]]:
    """Zero factor weights (coupling index k, factor index j) for even n.

    Decided in integer arithmetic: 2*cos(2*pi*(k-1)*j/n) vanishes exactly
    when 4*(k-1)*j is an odd multiple of n.  The opposite-cell weight
    (-1)^j never vanishes.  Nonempty for n = 4.
    """
    if n % 2:
        raise BadParity(f"cell count {n} must be even here")
    if n < 4:
        raise ValueError("even ring needs at least 4 cells")
    out = []
    for k in range(2, n // 2 + 1):
        for j in range(n):
            m = 4 * (k - 1) * j
            if m % n == 0 and (m // n) % 2 == 1:
                out.append((k, j))
    return sorted(out)


# ---------------------------------------------------------------------------
# Ring realization


def _layout_roles(
    n: int, indices: tuple[int, ...], sizes: Sequence[int], layout: Mapping
) -> list[int]:
    """Distribute delay columns (role 0 = internal, role d = coupling at
    distance d) so each selected factor's block starts with its own role."""
    internal = int(layout.get("internal", 0))
    couplings = {int(k): int(v) for k, v in (layout.get("couplings") or {}).items()}
    if internal < 0 or any(v < 0 for v in couplings.values()):
        raise ValueError("layout counts must be nonnegative")
    kmax = (n + 1) // 2
    for k in couplings:
        if not (2 <= k <= kmax):
            raise ValueError(f"layout coupling index {k} outside 2..{kmax}")
    total = internal + sum(couplings.values())
    if total != sum(sizes):
        raise ValueError(
            f"layout provides {total} delays but {sum(sizes)} frequencies are prescribed"
        )
    remaining = {0: internal}
    for k, cnt in couplings.items():
        remaining[k - 1] = remaining.get(k - 1, 0) + cnt
    leading = []
    for i in indices:
        if remaining.get(i, 0) < 1:
            role = "an internal delay" if i == 0 else f"a coupling-{i + 1} delay"
            raise ValueError(f"layout lacks {role} to lead the block of factor {i}")
        remaining[i] -= 1
        leading.append(i)
    filler = [d for d in sorted(remaining) for _ in range(remaining[d])]
    roles: list[int] = []
    pos = 0
    for j, size in enumerate(sizes):
        roles.append(leading[j])
        roles.extend(filler[pos: pos + size - 1])
        pos += size - 1
    return roles


def realize_ring(
    n: int,
    indices: Sequence[int],
    groups: Sequence[Sequence[float]],
    layout: Mapping,
    config: RealizeConfig | None = None,
) -> tuple[RingSpec, RealizationResult]:
    """Realize prescribed frequencies inside selected factors of an odd ring.

    ``layout`` states how many point delays belong to the internal profile
    and to each coupling profile, e.g. {"internal": 1, "couplings": {"2": 1}};
    the total must equal the number of prescribed frequencies.  The reduced
    leading-weight matrix is checked for singularity before any solving.
    Realized coefficients map back one-to-one: weight-1 columns become
    internal atoms, the others coupling atoms.
    """
    _check_odd(n)
    idx = _check_indices(n, indices)
    if len(groups) != len(idx):
        raise ValueError("need exactly one frequency group per selected factor")
    target = FrequencyTarget(tuple(tuple(g) for g in groups))
    roles = _layout_roles(n, idx, target.sizes, layout)

    reduced = build_B(n, idx, convention=2.0)
    hadamard = float(np.prod(np.linalg.norm(reduced, axis=0)))
    if abs(float(np.linalg.det(reduced))) <= 1e-12 * max(hadamard, 1e-300):
        raise SingularB(f"factor selection {idx} has a singular leading-weight matrix")

    rows = []
    for i in idx:
        rows.append([1.0 if d == 0 else _cos_weight(n, d * i) for d in roles])
    weights = WeightTable(np.array(rows))

    result = realize(target, weights, config)

    internal_atoms = []
    coupling_atoms: dict[int, list[tuple[float, float]]] = {}
    for col, d in enumerate(roles):
        atom = (float(result.coeffs[col]), float(result.taus[col]))
        if d == 0:
            internal_atoms.append(atom)
        else:
            coupling_atoms.setdefault(d + 1, []).append(atom)
    ring = RingSpec(
        n=n,
        internal=CouplingProfile(tuple(internal_atoms)),
        couplings={k: CouplingProfile(tuple(v)) for k, v in coupling_atoms.items()},
    )
    return ring, result


# ---------------------------------------------------------------------------
# JSON forms


def ring_to_dict(ring: RingSpec) -> dict:
    return {
        "n": ring.n,
        "internal": [{"a": a, "tau": s} for a, s in ring.internal.atoms],
        "couplings": {
            str(k): [{"alpha": a, "s": s} for a, s in prof.atoms]
            for k, prof in ring.couplings.items()
        },
    }


def ring_from_dict(data: dict) -> RingSpec:
    internal = CouplingProfile(tuple((t["a"], t["tau"]) for t in data.get("internal", [])))
    couplings = {
        int(k): CouplingProfile(tuple((t["alpha"], t["s"]) for t in atoms))
        for k, atoms in (data.get("couplings") or {}).items()
    }
    return RingSpec(int(data["n"]), internal, couplings)
