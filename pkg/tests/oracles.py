"""Independent oracles used across the test-suite.

Everything here deliberately avoids the library's own evaluation paths:
compensated/high-precision summation for factor values, dense matrix
assembly plus LAPACK determinants for ring systems, eigendecompositions
for factor weights, and finite differences for derivatives.
"""
from __future__ import annotations

import cmath
import math

import mpmath as mp
import numpy as np

from spectra_forge.realization import FrequencyTarget, WeightTable, base_point, index_vectors


def eval_factor_mp(terms, lam, dps: int = 50) -> complex:
    """High-precision factor value via mpmath; terms are (a, b, tau)."""
    with mp.workdps(dps):
        z = mp.mpc(lam.real, lam.imag)
        acc = z
        for a, b, tau in terms:
            acc -= mp.mpf(a) * mp.mpf(b) * mp.e ** (-z * mp.mpf(tau))
        return complex(acc)


def eval_factor_fsum(terms, lam) -> complex:
    """Compensated summation of the factor value in double precision."""
    res = [lam.real]
    ims = [lam.imag]
    for a, b, tau in terms:
        w = a * b * cmath.exp(-lam * tau)
        res.append(-w.real)
        ims.append(-w.imag)
    return complex(math.fsum(res), math.fsum(ims))


def central_difference(f, lam: complex, h: float = 1e-6) -> complex:
    return (f(lam + h) - f(lam - h)) / (2.0 * h)


def dense_ring_matrix(ring, lam: complex) -> np.ndarray:
    """Full n-by-n characteristic matrix of a ring, assembled entrywise
    from the symmetric circulant structure."""
    n = ring.n

    def ev(profile):
        return sum(a * cmath.exp(-lam * s) for a, s in profile.atoms)

    mat = np.zeros((n, n), dtype=complex)
    for i in range(n):
        for j in range(n):
            d = min((i - j) % n, (j - i) % n)
            prof = ring.internal if d == 0 else ring.couplings.get(d + 1)
            val = ev(prof) if prof is not None else 0.0
            mat[i, j] = (lam - val) if i == j else -val
    return mat


def dense_ring_det(ring, lam: complex) -> complex:
    return complex(np.linalg.det(dense_ring_matrix(ring, lam)))


def circulant_eigenvalues(n: int, diag: float, by_distance: dict[int, float]) -> np.ndarray:
    """Spectrum of the symmetric circulant with the given scalar entries."""
    mat = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            d = min((i - j) % n, (j - i) % n)
            mat[i, j] = diag if d == 0 else by_distance.get(d, 0.0)
    return np.sort(np.linalg.eigvalsh(mat))


def direct_transversality(target: FrequencyTarget, weights: WeightTable) -> float:
    """Transversality determinant assembled column-by-column from the
    explicit implicit-derivative blocks, independent of the closed form."""
    bp = base_point(target, weights)
    amps = bp.amplitudes
    b = weights.b
    n, r = target.n, target.r
    mu = target.prefix
    sizes = target.sizes
    alpha = np.zeros((n, n))
    for j in range(r):
        lj = sizes[j]
        vs = index_vectors(lj)
        denom = amps[mu[j + 1] - 1] * b[j, mu[j + 1] - 1]
        rows = slice(mu[j], mu[j + 1])
        wj = np.array(target.groups[j])
        for k in range(n - 1):
            coeff = -amps[k] * b[j, k] / denom
            inblock = mu[j] <= k < mu[j + 1]
            if j < r - 1:
                diag = vs[k - mu[j]] if inblock else np.ones(lj)
            else:
                diag = vs[lj - 1] * (vs[k - mu[j]] if inblock else np.ones(lj))
            alpha[rows, k] = coeff * diag * wj
        alpha[rows, n - 1] = wj
    return float(np.linalg.det(alpha))


def random_partition(rng: np.random.Generator, nmax: int = 8):
    """Random (target, weights) pair with nonzero weights and spread-out
    frequencies, for determinant-lemma style property tests."""
    r = int(rng.integers(1, 4))
    sizes = rng.integers(1, 4, size=r)
    while sizes.sum() > nmax:
        sizes = rng.integers(1, 4, size=r)
    n = int(sizes.sum())
    freqs = np.cumsum(0.3 + rng.random(n) * 2.0)
    groups, pos = [], 0
    for s in sizes:
        groups.append(tuple(float(x) for x in freqs[pos: pos + s]))
        pos += s
    target = FrequencyTarget(tuple(groups))
    b = rng.uniform(0.2, 2.0, size=(r, n)) * rng.choice([-1.0, 1.0], size=(r, n))
    return target, WeightTable(b)


def grid_scan_delay(omega: np.ndarray, angles: np.ndarray, epsilon: float,
                    tau_max: float, step: float = 1e-3) -> float | None:
    """Brute-force sweep: first tau <= tau_max meeting the angle targets."""
    taus = np.arange(step, tau_max, step)
    phase = np.mod(np.multiply.outer(taus, omega), 2.0 * np.pi)
    dist = np.abs(np.mod(phase - angles[None, :] + np.pi, 2.0 * np.pi) - np.pi)
    ok = np.nonzero(dist.max(axis=1) < epsilon)[0]
    return float(taus[ok[0]]) if ok.size else None
