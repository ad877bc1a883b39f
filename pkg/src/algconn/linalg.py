"""Dense symmetric eigendecomposition and PSD matrix utilities.

The eigensolver is a cyclic Jacobi iteration: rotations sweep the strict
upper triangle until the off-diagonal Frobenius mass falls below 1e-12
relative to the matrix norm, capped at 100 sweeps. That is accurate and
robust for the dense matrices this package works with (n up to ~100).
A batched eigenvalue-only variant serves the brute-force tree oracle.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

SYMMETRY_TOL = 1e-10
_OFFDIAG_TOL = 1e-12
_MAX_SWEEPS = 100


@dataclass(frozen=True)
class EigenDecomposition:
    """Eigenvalues in ascending order; column k of `vectors` pairs with value k."""

    values: np.ndarray
    vectors: np.ndarray


@dataclass(frozen=True)
class SubmatrixIndex:
    """Strictly increasing subset of {1..n} selecting a principal submatrix."""

    indices: tuple

    def __post_init__(self):
        idx = tuple(int(i) for i in self.indices)
        if not idx or any(b <= a for a, b in zip(idx, idx[1:])) or idx[0] < 1:
            raise ValueError("indices must be strictly increasing and start at 1 or above")
        object.__setattr__(self, "indices", idx)

    def take(self, A):
        sel = [i - 1 for i in self.indices]
        return A[np.ix_(sel, sel)]


def check_symmetric(A, tol=SYMMETRY_TOL):
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError("expected a square matrix")
    scale = max(1.0, float(np.abs(A).max()) if A.size else 0.0)
    if float(np.abs(A - A.T).max()) > tol * scale:
        raise ValueError("matrix is not symmetric within tolerance")
    return 0.5 * (A + A.T)


def _fix_sign(v, tol=1e-9):
    # first component of visible magnitude is made positive, for determinism
    for a in v:
        if abs(a) > tol:
            return v if a > 0 else -v
    return v


def sym_eigen(A):
    """Full spectrum and orthonormal eigenbasis of a symmetric matrix."""
    A = check_symmetric(A).copy()
    n = A.shape[0]
    V = np.eye(n)
    scale = max(1.0, float(np.linalg.norm(A)))
    for _ in range(_MAX_SWEEPS):
        off = A - np.diag(np.diag(A))
        if float(np.linalg.norm(off)) <= _OFFDIAG_TOL * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                if abs(apq) <= 1e-300:
                    continue
                theta = (A[q, q] - A[p, p]) / (2.0 * apq)
                if abs(theta) > 1e100:
                    t = 0.5 / theta
                else:
                    t = (1.0 if theta >= 0 else -1.0) / (
                        abs(theta) + np.sqrt(theta * theta + 1.0)
                    )
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                rp, rq = A[p, :].copy(), A[q, :].copy()
                A[p, :] = c * rp - s * rq
                A[q, :] = s * rp + c * rq
                cp, cq = A[:, p].copy(), A[:, q].copy()
                A[:, p] = c * cp - s * cq
                A[:, q] = s * cp + c * cq
                A[p, q] = A[q, p] = 0.0
                vp, vq = V[:, p].copy(), V[:, q].copy()
                V[:, p] = c * vp - s * vq
                V[:, q] = s * vp + c * vq
    values = np.diag(A).copy()
    order = np.argsort(values, kind="stable")
    vectors = V[:, order]
    for k in range(n):
        vectors[:, k] = _fix_sign(vectors[:, k])
    return EigenDecomposition(values[order], vectors)


def batch_eigenvalues(stack, tol=_OFFDIAG_TOL, max_sweeps=50):
    """Ascending eigenvalues of a (B, n, n) stack of symmetric matrices.

    All matrices follow the same cyclic rotation schedule, which vectorizes
    across the batch; used where thousands of small spectra are needed.
    """
    A = np.array(stack, dtype=float)
    if A.ndim != 3 or A.shape[1] != A.shape[2]:
        raise ValueError("expected a (B, n, n) stack")
    B, n, _ = A.shape
    if n == 1:
        return A[:, :, 0].copy()
    scale = max(1.0, float(np.abs(A).max()))
    iu, ju = np.triu_indices(n, 1)
    for _ in range(max_sweeps):
        if float(np.abs(A[:, iu, ju]).max()) <= tol * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[:, p, q]
                live = np.abs(apq) > 1e-300
                theta = np.zeros(B)
                np.divide(
                    A[:, q, q] - A[:, p, p], 2.0 * apq, out=theta, where=live
                )
                np.clip(theta, -1e100, 1e100, out=theta)
                t = np.where(theta >= 0, 1.0, -1.0) / (
                    np.abs(theta) + np.sqrt(theta * theta + 1.0)
                )
                t[~live] = 0.0
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                cc, ss = c[:, None], s[:, None]
                rp, rq = A[:, p, :].copy(), A[:, q, :].copy()
                A[:, p, :] = cc * rp - ss * rq
                A[:, q, :] = ss * rp + cc * rq
                cp, cq = A[:, :, p].copy(), A[:, :, q].copy()
                A[:, :, p] = cc * cp - ss * cq
                A[:, :, q] = ss * cp + cc * cq
                A[:, p, q] = A[:, q, p] = 0.0
    vals = A[:, np.arange(n), np.arange(n)]
    vals.sort(axis=1)
    return vals


def algebraic_connectivity(L):
    """Second-smallest eigenvalue of a Laplacian and a unit Fiedler vector.

    The returned vector is orthogonal to the all-ones vector and its first
    non-negligible component is positive.
    """
    L = check_symmetric(L)
    n = L.shape[0]
    scale = max(1.0, float(np.abs(L).max()))
    if float(np.abs(L.sum(axis=1)).max()) > 1e-8 * scale:
        raise ValueError("matrix rows do not sum to zero; not a Laplacian")
    dec = sym_eigen(L)
    if dec.values[0] < -1e-8 * scale:
        raise ValueError("matrix is not positive semidefinite; not a Laplacian")
    lam2 = float(dec.values[1])
    ones = np.ones(n) / np.sqrt(n)
    v = dec.vectors[:, 1].copy()
    v -= (v @ ones) * ones
    norm = np.linalg.norm(v)
    if norm < 1e-8:
        # lambda2 ~ 0 with the zero eigenspace mixed in; rebuild from the
        # near-null space a direction orthogonal to the ones vector
        span = dec.vectors[:, dec.values <= dec.values[1] + 1e-12 * scale]
        for k in range(span.shape[1]):
            cand = span[:, k] - (span[:, k] @ ones) * ones
            if np.linalg.norm(cand) > 1e-8:
                v, norm = cand, np.linalg.norm(cand)
                break
        else:
            raise ValueError("could not extract a Fiedler direction")
    v /= norm
    return lam2, _fix_sign(v)


def violated_submatrices(W, m, eps_psd):
    """Principal m x m submatrices of W whose minimum eigenvalue is <= -eps_psd.

    Scans all C(n, m) index subsets in lexicographic order and returns, for
    every violated one, its index set with the offending eigenpair.
    """
    W = check_symmetric(W)
    n = W.shape[0]
    if not (1 <= m <= n):
        raise ValueError(f"submatrix size {m} out of range for n={n}")
    if eps_psd <= 0:
        raise ValueError("eps_psd must be positive")
    hits = []
    for combo in itertools.combinations(range(n), m):
        if m == 1:
            val = W[combo[0], combo[0]]
            if val <= -eps_psd:
                hits.append(
                    (SubmatrixIndex((combo[0] + 1,)), float(val), np.array([1.0]))
                )
            continue
        if m == 2:
            a, b = combo
            waa, wbb, wab = W[a, a], W[b, b], W[a, b]
            mid = 0.5 * (waa + wbb)
            rad = np.hypot(0.5 * (waa - wbb), wab)
            lam = mid - rad
            if lam <= -eps_psd:
                vec = np.array([wab, lam - waa])
                if np.linalg.norm(vec) < 1e-14 * max(1.0, abs(lam)):
                    vec = np.array([1.0, 0.0]) if waa <= wbb else np.array([0.0, 1.0])
                vec = vec / np.linalg.norm(vec)
                hits.append(
                    (
                        SubmatrixIndex(tuple(c + 1 for c in combo)),
                        float(lam),
                        _fix_sign(vec),
                    )
                )
            continue
        sub = W[np.ix_(combo, combo)]
        dec = sym_eigen(sub)
        lam = float(dec.values[0])
        if lam <= -eps_psd:
            hits.append(
                (
                    SubmatrixIndex(tuple(c + 1 for c in combo)),
                    lam,
                    dec.vectors[:, 0].copy(),
                )
            )
    return hits


def psd_function(A, f):
    """Apply inverse, sqrt, or inv_sqrt to a symmetric matrix spectrally."""
    A = check_symmetric(A)
    dec = sym_eigen(A)
    vals = dec.values
    scale = max(1.0, float(np.abs(vals).max()))
    if f == "sqrt":
        if vals[0] < -1e-10 * scale:
            raise ValueError("sqrt requires a positive semidefinite matrix")
        fv = np.sqrt(np.clip(vals, 0.0, None))
    elif f in ("inverse", "inv_sqrt"):
        if vals[0] <= 1e-12 * scale:
            raise ValueError(f"{f} requires a positive definite matrix")
        fv = 1.0 / vals if f == "inverse" else 1.0 / np.sqrt(vals)
    else:
        raise ValueError(f"unknown spectral function {f!r}")
    out = (dec.vectors * fv) @ dec.vectors.T
    return 0.5 * (out + out.T)


def spectral_norm(A):
    """Largest singular value; equals max |eigenvalue| for symmetric input."""
    dec = sym_eigen(check_symmetric(A))
    return float(np.abs(dec.values).max())
