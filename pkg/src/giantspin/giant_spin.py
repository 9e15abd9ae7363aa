"""Exact giant-spin Hamiltonian H = A Jz - D Jz^2 + (E/2)(J+^2 + J-^2).

The matrix is built in the |S, m> basis with m ascending (-S ... +S). At zero
field the reflection m -> -m is a symmetry and the matrix is diagonalized in
the symmetric/antisymmetric combinations (|m> +- |-m>)/sqrt(2), which is what
makes sub-nanokelvin tunnel splittings extractable in double precision.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import SpinParams, UnsupportedConfigurationError, zeeman_energy
from .linalg import Spectrum, SymMatrix, eigh, lowest_eigenvalue, merge_spectra

DEFAULT_N_LOWEST = 4


@dataclass(frozen=True)
class GiantSpinMatrix:
    params: SpinParams
    matrix: SymMatrix
    basis: np.ndarray  # m values, ascending

    @property
    def dim(self) -> int:
        return self.matrix.dim


def m_values(S: float) -> np.ndarray:
    return -S + np.arange(int(round(2 * S)) + 1)


def double_raising_element(S: float, m: np.ndarray | float) -> np.ndarray:
    """<m+2| J+^2 |m>."""
    m = np.asarray(m, dtype=float)
    return np.sqrt(np.clip((S - m) * (S + m + 1) * (S - m - 1) * (S + m + 2), 0.0, None))


def giant_spin_entries(S: float, A: float, D: float, E: float) -> np.ndarray:
    """Dense matrix for arbitrary real A (negative fields included)."""
    m = m_values(S)
    h = np.diag(A * m - D * m * m)
    if len(m) > 2:
        off = 0.5 * E * double_raising_element(S, m[:-2])
        idx = np.arange(len(m) - 2)
        h[idx, idx + 2] = off
        h[idx + 2, idx] = off
    return h


def build_giant_spin(params: SpinParams) -> GiantSpinMatrix:
    A = zeeman_energy(params)
    h = giant_spin_entries(params.S, A, params.D, params.E)
    return GiantSpinMatrix(params, SymMatrix(h, bandwidth=2), m_values(params.S))


def reflection_embeddings(S: float) -> tuple[np.ndarray, np.ndarray]:
    """Columns spanning the symmetric and antisymmetric subspaces under m -> -m.

    The symmetric set contains |0> for integer S. Block basis states are ordered
    by |m| ascending.
    """
    m = m_values(S)
    n = len(m)
    centre = (n - 1) // 2
    sym, anti = [], []
    if n % 2 == 1:
        v = np.zeros(n)
        v[centre] = 1.0
        sym.append(v)
    first_positive = centre + 1 if n % 2 == 1 else n // 2
    for i in range(first_positive, n):
        j = n - 1 - i
        vs = np.zeros(n)
        va = np.zeros(n)
        vs[i] = vs[j] = np.sqrt(0.5)
        va[i] = np.sqrt(0.5)
        va[j] = -np.sqrt(0.5)
        sym.append(vs)
        anti.append(va)
    sym_e = np.array(sym).T
    anti_e = np.array(anti).T if anti else np.zeros((n, 0))
    return sym_e, anti_e


def _project(h: np.ndarray, embed: np.ndarray) -> SymMatrix:
    b = embed.T @ h @ embed
    upper = np.triu(b)
    return SymMatrix(upper + np.triu(b, 1).T)


def parity_blocks(params: SpinParams) -> dict[str, tuple[SymMatrix, np.ndarray]]:
    """Zero-field reflection blocks ``{"even": (block, embed), "odd": (block, embed)}``."""
    if params.H_par != 0:
        raise UnsupportedConfigurationError(
            "m -> -m is not a symmetry at nonzero field; use the full matrix or the sweep module"
        )
    h = build_giant_spin(params).matrix.entries
    sym_e, anti_e = reflection_embeddings(params.S)
    blocks = {"even": (_project(h, sym_e), sym_e)}
    if anti_e.shape[1]:
        blocks["odd"] = (_project(h, anti_e), anti_e)
    return blocks


def sector_blocks(params: SpinParams) -> dict[int, tuple[SymMatrix, np.ndarray]]:
    """Blocks of fixed (m + S) mod 2; the Hamiltonian only couples m to m +- 2.

    Valid at any field. Each block is tridiagonal. Values are ``(block, m)``.
    """
    gs = build_giant_spin(params)
    h = gs.matrix.entries
    out = {}
    for r in (0, 1):
        idx = np.nonzero(np.round(gs.basis + params.S).astype(int) % 2 == r)[0]
        if idx.size:
            out[r] = (SymMatrix(h[np.ix_(idx, idx)], bandwidth=1), gs.basis[idx])
    return out


def reference_spectrum(params: SpinParams, n_lowest: int = DEFAULT_N_LOWEST) -> Spectrum:
    """Lowest exact eigenpairs; eigenvectors are in the m-ascending basis.

    At zero field levels carry the reflection parity label ``"even"``/``"odd"``.
    """
    gs = build_giant_spin(params)
    if not 1 <= n_lowest <= gs.dim:
        raise ValueError(f"n_lowest must be in [1, {gs.dim}], got {n_lowest}")
    if params.H_par != 0:
        return eigh(gs.matrix, n_lowest)
    parts = [(eigh(block), embed, label) for label, (block, embed) in parity_blocks(params).items()]
    return merge_spectra(parts, gs.matrix, n_lowest)


def doublet_sectors(params: SpinParams) -> dict[str, SymMatrix]:
    """Zero-field blocks of fixed reflection parity and fixed (m + S) mod 2.

    Keys are ``"even/0"``, ``"even/1"``, ``"odd/0"``, ``"odd/1"``; every block
    is tridiagonal.
    """
    out = {}
    for label, (block, embed) in parity_blocks(params).items():
        m_abs = np.sqrt((embed**2).T @ m_values(params.S) ** 2)
        residue = np.round(m_abs + params.S).astype(int) % 2
        for r in (0, 1):
            idx = np.nonzero(residue == r)[0]
            if idx.size:
                out[f"{label}/{r}"] = SymMatrix(block.entries[np.ix_(idx, idx)], bandwidth=1)
    return out


def reference_splitting(params: SpinParams) -> float:
    """Ground-doublet tunnel splitting in Kelvin at zero field.

    Difference between the lowest levels of the two reflection blocks, each
    resolved by bisection on its tridiagonal sectors. The sign of (odd - even)
    depends on S and E, so the magnitude is returned. Half-integer spins have
    exactly degenerate (Kramers) doublets and return 0.
    """
    if params.H_par != 0:
        raise UnsupportedConfigurationError(
            "tunnel splitting is defined at zero field; use sweep.locate_matchings for H > 0"
        )
    if not params.is_integer_spin:
        return 0.0
    lows = {"even": np.inf, "odd": np.inf}
    for key, block in doublet_sectors(params).items():
        parity = key.partition("/")[0]
        lows[parity] = min(lows[parity], lowest_eigenvalue(block))
    return float(abs(lows["odd"] - lows["even"]))
