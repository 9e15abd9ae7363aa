"""Dense real-symmetric eigendecomposition.

Two deterministic routes are provided:

* ``"ql"``: Householder reduction to tridiagonal form followed by the implicit
  shifted QL iteration. Tridiagonal input skips the reduction, so the parity
  sector blocks used elsewhere in the package are diagonalized directly.
* ``"jacobi"``: cyclic Jacobi rotations. Slower; used as an independent check.

Both return a :class:`Spectrum` with ascending eigenvalues, orthonormal
eigenvectors (columns) and per-pair residual norms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import ConvergenceError, GiantSpinError, NumericalError

__all__ = [
    "SymMatrix",
    "Spectrum",
    "ValidationError",
    "eigh",
    "eigvalsh",
    "tridiagonalize",
    "merge_spectra",
    "sturm_count",
    "tridiagonal_eigenvalue",
    "lowest_eigenvalue",
]

QL_MAX_ITER = 60
# off-diagonals below this are treated as zero (their squares underflow)
SAFE_MIN = np.finfo(float).tiny / np.finfo(float).eps
JACOBI_MAX_SWEEPS = 60


class ValidationError(GiantSpinError, ValueError):
    """Input matrix violates the symmetric-matrix contract."""


def _readonly(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class SymMatrix:
    """Real symmetric matrix with an optional half-bandwidth hint.

    Symmetry is checked exactly; assembly code is expected to write both
    triangles from the same expression.
    """

    entries: np.ndarray
    bandwidth: int | None = None

    def __post_init__(self) -> None:
        a = np.array(self.entries, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] == 0:
            raise ValidationError(f"expected a non-empty square matrix, got shape {a.shape}")
        if not np.all(np.isfinite(a)):
            raise ValidationError("matrix has non-finite entries")
        if not np.array_equal(a, a.T):
            i, j = np.unravel_index(np.argmax(np.abs(a - a.T)), a.shape)
            raise ValidationError(
                f"matrix is not symmetric: entries [{i},{j}]={a[i, j]!r} and [{j},{i}]={a[j, i]!r}"
            )
        if self.bandwidth is not None:
            if self.bandwidth < 0:
                raise ValidationError("bandwidth must be non-negative")
            i, j = np.nonzero(a)
            if i.size and np.max(np.abs(i - j)) > self.bandwidth:
                raise ValidationError(
                    f"nonzero entry outside declared bandwidth {self.bandwidth}"
                )
        object.__setattr__(self, "entries", _readonly(a))

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def frobenius_norm(self) -> float:
        return float(np.linalg.norm(self.entries))

    def is_tridiagonal(self) -> bool:
        if self.bandwidth is not None and self.bandwidth <= 1:
            return True
        a = self.entries
        return not (np.any(np.triu(a, 2)))


@dataclass(frozen=True)
class Spectrum:
    """Ascending eigenvalues with eigenvector columns, residual norms and labels."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray | None = None
    residuals: np.ndarray | None = None
    labels: tuple[str, ...] | None = None
    iterations: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "eigenvalues", _readonly(np.asarray(self.eigenvalues, dtype=float)))
        if self.eigenvectors is not None:
            object.__setattr__(self, "eigenvectors", _readonly(np.asarray(self.eigenvectors, dtype=float)))
        if self.residuals is not None:
            object.__setattr__(self, "residuals", _readonly(np.asarray(self.residuals, dtype=float)))
        if self.labels is not None:
            object.__setattr__(self, "labels", tuple(self.labels))
            if len(self.labels) != len(self.eigenvalues):
                raise ValueError("one label per eigenvalue required")

    def __len__(self) -> int:
        return len(self.eigenvalues)

    @property
    def max_residual(self) -> float:
        if self.residuals is None or len(self.residuals) == 0:
            return 0.0
        return float(np.max(self.residuals))

    def truncate(self, n: int) -> Spectrum:
        return Spectrum(
            self.eigenvalues[:n],
            None if self.eigenvectors is None else self.eigenvectors[:, :n],
            None if self.residuals is None else self.residuals[:n],
            None if self.labels is None else self.labels[:n],
            self.iterations,
        )


def tridiagonalize(a: np.ndarray, vectors: bool = True):
    """Householder reduction ``Q.T @ a @ Q = T``.

    Returns ``(diag, offdiag, Q)``; ``Q`` is None when ``vectors`` is false.
    Columns already in tridiagonal form are left untouched, so tridiagonal
    input comes back unchanged with ``Q = I``.
    """
    a = np.array(a, dtype=float)
    n = a.shape[0]
    q = np.eye(n) if vectors else None
    for k in range(n - 2):
        x = a[k + 1 :, k]
        if not np.any(x[1:]):
            continue
        scale = float(np.max(np.abs(x)))
        xs = x / scale
        alpha = -math.copysign(float(np.linalg.norm(xs)), xs[0])
        v = xs.copy()
        v[0] -= alpha
        v /= np.linalg.norm(v)
        alpha *= scale
        sub = a[k + 1 :, k + 1 :]
        p = sub @ v
        w = p - (v @ p) * v
        sub -= 2.0 * (np.outer(v, w) + np.outer(w, v))
        a[k + 1, k] = a[k, k + 1] = alpha
        a[k + 2 :, k] = 0.0
        a[k, k + 2 :] = 0.0
        if q is not None:
            qs = q[:, k + 1 :]
            qs -= 2.0 * np.outer(qs @ v, v)
    return np.diag(a).copy(), np.diag(a, 1).copy(), q


def _tql(d: np.ndarray, e: np.ndarray, zt: np.ndarray | None) -> tuple[list[float], int]:
    """Implicit-shift QL on a symmetric tridiagonal matrix.

    ``d`` is the diagonal, ``e`` the superdiagonal. ``zt`` holds the current
    basis as rows and is rotated in place. Returns unsorted eigenvalues and the
    total QL iteration count.
    """
    n = len(d)
    d = [float(x) for x in d]
    e = [float(x) for x in e] + [0.0]
    total = 0
    for l in range(n):
        it = 0
        while True:
            m = l
            while m < n - 1:
                dd = abs(d[m]) + abs(d[m + 1])
                if abs(e[m]) + dd == dd or abs(e[m]) < SAFE_MIN:
                    e[m] = 0.0
                    break
                m += 1
            if m == l:
                break
            if it == QL_MAX_ITER:
                raise ConvergenceError(f"QL iteration did not converge for eigenvalue {l}", total)
            it += 1
            total += 1
            g = (d[l + 1] - d[l]) / (2.0 * e[l])
            r = math.hypot(g, 1.0)
            g = d[m] - d[l] + e[l] / (g + math.copysign(r, g))
            s = c = 1.0
            p = 0.0
            i = m - 1
            deflated = False
            while i >= l:
                f = s * e[i]
                b = c * e[i]
                r = math.hypot(f, g)
                e[i + 1] = r
                if r == 0.0:
                    d[i + 1] -= p
                    e[m] = 0.0
                    deflated = True
                    break
                s = f / r
                c = g / r
                g = d[i + 1] - p
                r = (d[i] - g) * s + 2.0 * c * b
                p = s * r
                d[i + 1] = g + p
                g = c * r - b
                if zt is not None:
                    zi = zt[i].copy()
                    zt[i] = c * zi - s * zt[i + 1]
                    zt[i + 1] = s * zi + c * zt[i + 1]
                i -= 1
            if deflated:
                continue
            d[l] -= p
            e[l] = g
            e[m] = 0.0
    return d, total


def _jacobi(a: np.ndarray, vectors: bool) -> tuple[np.ndarray, np.ndarray | None, int]:
    a = np.array(a, dtype=float)
    n = a.shape[0]
    v = np.eye(n) if vectors else None
    for sweep in range(JACOBI_MAX_SWEEPS):
        if not np.any(np.triu(a, 1)):
            return np.diag(a).copy(), v, sweep
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                if abs(apq) < SAFE_MIN:
                    a[p, q] = a[q, p] = 0.0
                    continue
                # negligible against both diagonal entries: drop it
                g = 100.0 * abs(apq)
                if sweep > 3 and abs(a[p, p]) + g == abs(a[p, p]) and abs(a[q, q]) + g == abs(a[q, q]):
                    a[p, q] = a[q, p] = 0.0
                    continue
                h = a[q, q] - a[p, p]
                if abs(h) + g == abs(h):
                    t = apq / h
                else:
                    theta = 0.5 * h / apq
                    t = math.copysign(1.0, theta) / (abs(theta) + math.hypot(theta, 1.0))
                c = 1.0 / math.hypot(t, 1.0)
                s = t * c
                cp = a[:, p].copy()
                a[:, p] = c * cp - s * a[:, q]
                a[:, q] = s * cp + c * a[:, q]
                rp = a[p, :].copy()
                a[p, :] = c * rp - s * a[q, :]
                a[q, :] = s * rp + c * a[q, :]
                a[p, q] = a[q, p] = 0.0
                if v is not None:
                    vp = v[:, p].copy()
                    v[:, p] = c * vp - s * v[:, q]
                    v[:, q] = s * vp + c * v[:, q]
    raise ConvergenceError("Jacobi sweeps did not converge", JACOBI_MAX_SWEEPS)


def _fix_signs(vecs: np.ndarray) -> None:
    """Make the largest-magnitude component of each column positive."""
    idx = np.argmax(np.abs(vecs), axis=0)
    signs = np.sign(vecs[idx, np.arange(vecs.shape[1])])
    signs[signs == 0] = 1.0
    vecs *= signs


def _as_symmatrix(matrix) -> SymMatrix:
    return matrix if isinstance(matrix, SymMatrix) else SymMatrix(np.asarray(matrix))


def eigh(
    matrix: SymMatrix | np.ndarray,
    n_lowest: int | None = None,
    *,
    vectors: bool = True,
    method: str = "ql",
) -> Spectrum:
    """Eigendecomposition of a real symmetric matrix.

    Args:
        matrix: the matrix; plain arrays are validated through SymMatrix.
        n_lowest: keep only this many lowest pairs.
        vectors: compute eigenvectors and residuals.
        method: ``"ql"`` or ``"jacobi"``.

    Raises:
        ValidationError: non-symmetric or malformed input.
        ConvergenceError: iteration budget exhausted.
    """
    m = _as_symmatrix(matrix)
    n = m.dim
    if n_lowest is not None and not 1 <= n_lowest:
        raise ValueError("n_lowest must be positive")
    if method == "ql":
        if m.is_tridiagonal():
            d, e = np.diag(m.entries), np.diag(m.entries, 1)
            q = np.eye(n) if vectors else None
        else:
            d, e, q = tridiagonalize(m.entries, vectors)
        zt = None if q is None else np.ascontiguousarray(q.T)
        evals, iterations = _tql(d, e, zt)
        evals = np.asarray(evals)
        evecs = None if zt is None else zt.T
    elif method == "jacobi":
        evals, evecs, iterations = _jacobi(m.entries, vectors)
    else:
        raise ValueError(f"unknown method {method!r}")

    order = np.argsort(evals, kind="stable")
    evals = evals[order]
    if n_lowest is not None:
        order = order[:n_lowest]
        evals = evals[:n_lowest]
    if evecs is None:
        return Spectrum(evals, iterations=iterations)

    evecs = np.array(evecs[:, order])
    evecs /= np.linalg.norm(evecs, axis=0)
    _fix_signs(evecs)
    residuals = np.linalg.norm(m.entries @ evecs - evecs * evals, axis=0)
    bound = 1e-10 * (1.0 + m.frobenius_norm())
    if np.any(residuals > bound):
        raise NumericalError(
            f"eigenpair residual {float(np.max(residuals)):.3e} exceeds bound {bound:.3e}"
        )
    return Spectrum(evals, evecs, residuals, iterations=iterations)


def eigvalsh(matrix: SymMatrix | np.ndarray, n_lowest: int | None = None) -> np.ndarray:
    """Eigenvalues only, ascending."""
    return eigh(matrix, n_lowest, vectors=False).eigenvalues


def merge_spectra(
    parts: Sequence[tuple[Spectrum, np.ndarray, str]],
    full: SymMatrix | None = None,
    n_lowest: int | None = None,
) -> Spectrum:
    """Merge block spectra into one spectrum in the full basis.

    Each part is ``(spectrum, embedding, label)`` where ``embedding`` maps block
    coordinates to full coordinates (columns = block basis vectors). Residuals
    are recomputed against ``full`` when given.
    """
    values, vecs, labels = [], [], []
    have_vectors = all(sp.eigenvectors is not None for sp, _, _ in parts)
    for sp, embed, label in parts:
        values.append(sp.eigenvalues)
        labels.extend([label] * len(sp))
        if have_vectors:
            vecs.append(embed @ sp.eigenvectors)
    evals = np.concatenate(values)
    order = np.argsort(evals, kind="stable")
    if n_lowest is not None:
        order = order[:n_lowest]
    evals = evals[order]
    labels = tuple(labels[i] for i in order)
    iterations = sum(sp.iterations for sp, _, _ in parts)
    if not have_vectors:
        return Spectrum(evals, labels=labels, iterations=iterations)
    evecs = np.concatenate(vecs, axis=1)[:, order]
    residuals = None
    if full is not None:
        residuals = np.linalg.norm(full.entries @ evecs - evecs * evals, axis=0)
    else:
        residuals = np.concatenate([sp.residuals for sp, _, _ in parts])[order]
    return Spectrum(evals, evecs, residuals, labels, iterations)


def sturm_count(d: Sequence[float], e: Sequence[float], x: float) -> int:
    """Number of eigenvalues of the tridiagonal matrix (d, e) strictly below x.

    Counts negative pivots of the LDL^T factorization of T - x I, processed from
    the first row down.
    """
    pivmin = 1e-300
    count = 0
    q = d[0] - x
    if q == 0.0:
        q = -pivmin
    if q < 0.0:
        count += 1
    for i in range(1, len(d)):
        q = d[i] - x - e[i - 1] * e[i - 1] / q
        if q == 0.0:
            q = -pivmin
        if q < 0.0:
            count += 1
    return count


def tridiagonal_eigenvalue(matrix: SymMatrix | np.ndarray, index: int = 0) -> float:
    """The ``index``-th smallest eigenvalue of a tridiagonal matrix by bisection.

    Bisection runs until the bracket cannot be split in floating point, so the
    result is a deterministic function of the entries that decide the Sturm
    count near the eigenvalue. Rows far from it (e.g. a longer tail of large
    diagonal entries) do not change the answer.
    """
    m = _as_symmatrix(matrix)
    if not m.is_tridiagonal():
        raise ValidationError("bisection requires a tridiagonal matrix")
    n = m.dim
    if not 0 <= index < n:
        raise ValueError(f"index must be in [0, {n}), got {index}")
    d = [float(x) for x in np.diag(m.entries)]
    e = [float(x) for x in np.diag(m.entries, 1)]
    radius = [0.0] * n
    for i, v in enumerate(e):
        radius[i] += abs(v)
        radius[i + 1] += abs(v)
    lo = min(di - ri for di, ri in zip(d, radius))
    hi = max(di + ri for di, ri in zip(d, radius))
    width = max(hi - lo, abs(lo), abs(hi), 1e-300)
    lo -= 1e-12 * width
    hi += 1e-12 * width
    for _ in range(4000):
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        if sturm_count(d, e, mid) > index:
            hi = mid
        else:
            lo = mid
    else:  # pragma: no cover - 4000 halvings exceed the float range
        raise ConvergenceError("bisection did not converge", 4000)
    return 0.5 * (lo + hi)


def lowest_eigenvalue(matrix: SymMatrix | np.ndarray) -> float:
    """Smallest eigenvalue; tridiagonal input is resolved to the last bit by bisection."""
    m = _as_symmatrix(matrix)
    if m.is_tridiagonal():
        return tridiagonal_eigenvalue(m, 0)
    return float(eigh(m, 1, vectors=False).eigenvalues[0])
