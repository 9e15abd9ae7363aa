"""Angle-representation Hamiltonian with a position-dependent effective mass.

    H(phi) = -1/2 d/dphi I(phi) d/dphi + V(phi),   I = 1/M,   -pi < phi <= pi

with

    V(phi) = -(D-E) S(S+1) cos^2 phi - sqrt(S(S+1)) g muB H cos phi - E S(S+1)
    I(phi) = 2(D-E) cos^2 phi + (g muB H / S) cos phi + 4E

Both functions are even trigonometric polynomials of degree 2, so the Galerkin
matrix in the plane-wave basis e^{i n phi}/sqrt(2 pi), |n| <= kmax, is exact
(no quadrature) and pentadiagonal:

    <n'|H|n> = (1/2) n n' I_hat[n'-n] + V_hat[n'-n].

Because V and I are even in phi the matrix splits into cosine ("even") and
sine ("odd") blocks. At zero field only even harmonics appear in V and I, so
each block splits again into even-n and odd-n sectors ("harmonics"), which are
exchanged by the shift phi -> phi + pi. The ground tunnel doublet lives in the
two cosine sectors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core import CONSTANTS, SpinParams, UnsupportedConfigurationError
from .linalg import Spectrum, SymMatrix, eigh, lowest_eigenvalue

DEFAULT_GRID_POINTS = 512
INTERVALS = {"standard": -math.pi, "figure": -math.pi / 2}


def default_kmax(S: float) -> int:
    """64 for S <= 10, growing linearly beyond."""
    return max(64, int(math.ceil(6.4 * S)))


@dataclass(frozen=True)
class TrigPoly:
    """c0 + c1 cos(phi) + c2 cos(2 phi)."""

    c0: float
    c1: float = 0.0
    c2: float = 0.0

    def __call__(self, phi):
        phi = np.asarray(phi, dtype=float)
        return self.c0 + self.c1 * np.cos(phi) + self.c2 * np.cos(2 * phi)

    def derivative(self, phi):
        phi = np.asarray(phi, dtype=float)
        return -self.c1 * np.sin(phi) - 2 * self.c2 * np.sin(2 * phi)

    def hat(self, k):
        """Exponential Fourier coefficient of e^{i k phi}."""
        k = np.abs(np.asarray(k))
        return np.where(k == 0, self.c0, np.where(k == 1, 0.5 * self.c1, np.where(k == 2, 0.5 * self.c2, 0.0)))

    def shifted_by_pi(self) -> TrigPoly:
        """The polynomial of phi + pi (flips the cos(phi) term)."""
        return TrigPoly(self.c0, -self.c1, self.c2)

    def minimum(self) -> float:
        """Exact minimum over phi, as a quadratic in x = cos(phi) on [-1, 1]."""
        # c0 - c2 + c1 x + 2 c2 x^2
        a, b, c = 2 * self.c2, self.c1, self.c0 - self.c2
        candidates = [a + b + c, a - b + c]
        if a > 0:
            x = -b / (2 * a)
            if -1 < x < 1:
                candidates.append(c - b * b / (4 * a))
        return float(min(candidates))


def potential_poly(params: SpinParams) -> TrigPoly:
    ss = params.spin_square
    dE = params.D - params.E
    field_term = math.sqrt(ss) * params.g * CONSTANTS.mu_B_over_k_B * params.H_par
    return TrigPoly(-0.5 * dE * ss - params.E * ss, -field_term, -0.5 * dE * ss)


def inverse_mass_poly(params: SpinParams) -> TrigPoly:
    dE = params.D - params.E
    return TrigPoly(
        params.D + 3 * params.E,
        params.g * CONSTANTS.mu_B_over_k_B * params.H_par / params.S,
        dE,
    )


def potential(phi, params: SpinParams):
    """V(phi) in Kelvin."""
    ss = params.spin_square
    c = np.cos(np.asarray(phi, dtype=float))
    A = params.g * CONSTANTS.mu_B_over_k_B * params.H_par
    return -(params.D - params.E) * ss * c**2 - math.sqrt(ss) * A * c - params.E * ss


def inverse_mass(phi, params: SpinParams):
    """I(phi) = 1/M(phi) in Kelvin. Zeros are legal output."""
    c = np.cos(np.asarray(phi, dtype=float))
    return (
        2 * (params.D - params.E) * c**2
        + params.g * CONSTANTS.mu_B_over_k_B * params.H_par / params.S * c
        + 4 * params.E
    )


def effective_mass(phi, params: SpinParams):
    """M(phi) in 1/K; infinite where the inverse mass vanishes."""
    with np.errstate(divide="ignore"):
        return 1.0 / inverse_mass(phi, params)


def _sector_key(parity: str, harmonics: str | None) -> str:
    return parity if harmonics is None else f"{parity}/{harmonics}"


@dataclass(frozen=True)
class AngleHamiltonian:
    """Galerkin realization of the angle Hamiltonian for a truncation kmax.

    ``params`` is None when built directly from coefficients (used to probe the
    reflected field, which SpinParams does not admit).
    """

    params: SpinParams | None
    V: TrigPoly
    I: TrigPoly
    kmax: int
    mass_singular: bool = field(init=False)

    def __post_init__(self) -> None:
        if int(self.kmax) != self.kmax or self.kmax < 2:
            raise ValueError(f"kmax must be an integer >= 2, got {self.kmax!r}")
        object.__setattr__(self, "kmax", int(self.kmax))
        object.__setattr__(self, "mass_singular", self.I.minimum() <= 0.0)

    @property
    def has_shift_symmetry(self) -> bool:
        return self.V.c1 == 0 and self.I.c1 == 0

    def _element(self, a: np.ndarray, b: np.ndarray, kinetic_only: bool = False) -> np.ndarray:
        """Plane-wave element <a|H|b> for integer arrays a (rows) and b (cols)."""
        d = a[:, None] - b[None, :]
        ab = a[:, None] * b[None, :]
        out = 0.5 * ab * self.I.hat(d)
        if not kinetic_only:
            out = out + self.V.hat(d)
        return out

    def plane_wave_matrix(self, kinetic_only: bool = False) -> SymMatrix:
        """Full pentadiagonal matrix, basis n = -kmax ... kmax."""
        n = np.arange(-self.kmax, self.kmax + 1)
        return SymMatrix(self._element(n, n, kinetic_only), bandwidth=2)

    def even_block(self, kinetic_only: bool = False) -> SymMatrix:
        """Cosine block; basis 1/sqrt(2pi), cos(n phi)/sqrt(pi), n = 1 ... kmax."""
        n = np.arange(0, self.kmax + 1)
        h = self._element(n, n, kinetic_only) + self._element(n, -n, kinetic_only)
        h[0, :] *= math.sqrt(0.5)
        h[:, 0] *= math.sqrt(0.5)
        return SymMatrix(h)

    def odd_block(self, kinetic_only: bool = False) -> SymMatrix:
        """Sine block; basis sin(n phi)/sqrt(pi), n = 1 ... kmax."""
        n = np.arange(1, self.kmax + 1)
        return SymMatrix(self._element(n, n, kinetic_only) - self._element(n, -n, kinetic_only))

    def blocks(self) -> dict[str, tuple[SymMatrix, np.ndarray]]:
        """Independent blocks with the harmonic indices n of their basis functions.

        Keys are ``"even"``/``"odd"`` (reflection parity) and, when the shift
        symmetry holds, ``"even/even"``, ``"even/odd"``, ``"odd/even"``,
        ``"odd/odd"`` (parity / harmonic parity).
        """
        cos_n = np.arange(0, self.kmax + 1)
        sin_n = np.arange(1, self.kmax + 1)
        whole = {"even": (self.even_block(), cos_n), "odd": (self.odd_block(), sin_n)}
        if not self.has_shift_symmetry:
            return whole
        out = {}
        for parity, (block, n) in whole.items():
            for harmonics, r in (("even", 0), ("odd", 1)):
                idx = np.nonzero(n % 2 == r)[0]
                sub = block.entries[np.ix_(idx, idx)]
                out[_sector_key(parity, harmonics)] = (SymMatrix(sub, bandwidth=1), n[idx])
        return out

    def trig_matrix(self) -> SymMatrix:
        """Block-diagonal matrix in the real basis [cos_0..cos_kmax, sin_1..sin_kmax]."""
        e, o = self.even_block().entries, self.odd_block().entries
        k = self.kmax
        h = np.zeros((2 * k + 1, 2 * k + 1))
        h[: k + 1, : k + 1] = e
        h[k + 1 :, k + 1 :] = o
        return SymMatrix(h)


def assemble(params: SpinParams, kmax: int | None = None) -> AngleHamiltonian:
    """Build V, I and the Galerkin blocks. Requires D > E.

    Above the cutoff field I(phi) has zeros; the result is still returned with
    ``mass_singular`` set.
    """
    params.require_angle_domain()
    if kmax is None:
        kmax = default_kmax(params.S)
    return AngleHamiltonian(params, potential_poly(params), inverse_mass_poly(params), kmax)


def phi_grid(points: int = DEFAULT_GRID_POINTS, interval: str = "standard") -> np.ndarray:
    """Uniform grid over (start, start + 2pi], start = -pi or -pi/2 ("figure")."""
    if points < 1:
        raise ValueError("points must be positive")
    start = INTERVALS[interval]
    return start + 2 * math.pi * np.arange(1, points + 1) / points


@dataclass(frozen=True)
class Wavefunction:
    """Real eigenfunction as a cosine or sine series in the normalized trig basis.

    ``coefficients[n]`` multiplies cos(n phi)/sqrt(pi) (1/sqrt(2pi) for n=0) when
    ``parity == "even"``, or sin(n phi)/sqrt(pi) when ``parity == "odd"``.
    ``harmonics`` is ``"even"``/``"odd"`` when the state is an eigenstate of
    phi -> phi + pi (zero field), else None.
    """

    level: int
    energy: float
    parity: str
    harmonics: str | None
    coefficients: np.ndarray
    phi: np.ndarray
    samples: np.ndarray

    def __call__(self, phi):
        return _evaluate(self.parity, self.coefficients, phi)

    def norm(self) -> float:
        """L2 norm from the coefficients (exact for the truncated series)."""
        return float(np.linalg.norm(self.coefficients))

    def grid_norm(self) -> float:
        """Periodic trapezoidal sum of psi^2 on the sample grid."""
        dphi = 2 * math.pi / len(self.phi)
        return float(np.sum(self.samples**2) * dphi)


def _evaluate(parity: str, coeffs: np.ndarray, phi) -> np.ndarray:
    phi = np.asarray(phi, dtype=float)
    n = np.arange(len(coeffs))
    if parity == "even":
        basis = np.cos(np.multiply.outer(phi, n)) / math.sqrt(math.pi)
        basis[..., 0] = 1.0 / math.sqrt(2 * math.pi)
    else:
        basis = np.sin(np.multiply.outer(phi, n)) / math.sqrt(math.pi)
    return basis @ coeffs


def _orient(parity: str, coeffs: np.ndarray) -> np.ndarray:
    """Sign convention: psi(0) > 0 for even states, psi'(0) > 0 for odd states."""
    n = np.arange(len(coeffs))
    if parity == "even":
        ref = _evaluate(parity, coeffs, 0.0)
    else:
        ref = float(n @ coeffs)
    if abs(ref) < 1e-8 * max(1.0, float(np.max(np.abs(coeffs)))):
        ref = coeffs[np.argmax(np.abs(coeffs))]
    return coeffs if ref >= 0 else -coeffs


@dataclass(frozen=True)
class _Level:
    energy: float
    key: str
    n: np.ndarray
    vector: np.ndarray | None
    residual: float


def _solve_levels(ham: AngleHamiltonian, n_levels: int, vectors: bool) -> list[_Level]:
    levels = []
    for key, (block, n) in ham.blocks().items():
        k = min(n_levels, block.dim)
        sp = eigh(block, k, vectors=vectors)
        for j in range(len(sp)):
            levels.append(
                _Level(
                    float(sp.eigenvalues[j]),
                    key,
                    n,
                    None if sp.eigenvectors is None else sp.eigenvectors[:, j],
                    0.0 if sp.residuals is None else float(sp.residuals[j]),
                )
            )
    levels.sort(key=lambda lv: lv.energy)
    return levels[:n_levels]


def _coefficients(ham: AngleHamiltonian, level: _Level) -> tuple[str, str | None, np.ndarray]:
    parity, _, harmonics = level.key.partition("/")
    coeffs = np.zeros(ham.kmax + 1)
    coeffs[level.n] = level.vector
    return parity, harmonics or None, _orient(parity, coeffs)


def solve(
    params: SpinParams,
    kmax: int | None = None,
    n_levels: int = 4,
    grid_points: int = DEFAULT_GRID_POINTS,
    interval: str = "standard",
) -> list[tuple[float, Wavefunction]]:
    """Lowest ``n_levels`` eigenpairs merged over all symmetry blocks, ascending."""
    ham = assemble(params, kmax)
    return solve_hamiltonian(ham, n_levels, grid_points, interval)


def solve_hamiltonian(
    ham: AngleHamiltonian,
    n_levels: int = 4,
    grid_points: int = DEFAULT_GRID_POINTS,
    interval: str = "standard",
) -> list[tuple[float, Wavefunction]]:
    phi = phi_grid(grid_points, interval)
    out = []
    for i, level in enumerate(_solve_levels(ham, n_levels, vectors=True)):
        parity, harmonics, coeffs = _coefficients(ham, level)
        wf = Wavefunction(i, level.energy, parity, harmonics, coeffs, phi, _evaluate(parity, coeffs, phi))
        out.append((level.energy, wf))
    return out


def angle_spectrum(params: SpinParams, kmax: int | None = None, n_levels: int = 4) -> Spectrum:
    """Spectrum in the real trig basis [cos_0..cos_kmax, sin_1..sin_kmax].

    Labels are block keys such as ``"even/odd"``; residuals are against the
    block-diagonal trig matrix.
    """
    ham = assemble(params, kmax)
    return hamiltonian_spectrum(ham, n_levels)


def hamiltonian_spectrum(ham: AngleHamiltonian, n_levels: int = 4) -> Spectrum:
    levels = _solve_levels(ham, n_levels, vectors=True)
    k = ham.kmax
    vecs = np.zeros((2 * k + 1, len(levels)))
    for j, level in enumerate(levels):
        offset = 0 if level.key.startswith("even") else k
        vecs[offset + level.n, j] = level.vector
    return Spectrum(
        [lv.energy for lv in levels],
        vecs,
        [lv.residual for lv in levels],
        tuple(lv.key for lv in levels),
    )


def angle_eigenvalues(params: SpinParams, kmax: int | None = None, n_levels: int = 4) -> np.ndarray:
    """Lowest eigenvalues only (no eigenvectors)."""
    ham = assemble(params, kmax)
    return np.array([lv.energy for lv in _solve_levels(ham, n_levels, vectors=False)])


def angle_splitting(params: SpinParams, kmax: int | None = None) -> float:
    """Zero-field tunnel splitting: lowest odd-harmonic minus lowest even-harmonic level.

    The two wells at phi = 0 and pi are exchanged by phi -> phi + pi, so the
    doublet partners differ in harmonic parity, not in reflection parity.
    """
    if params.H_par != 0:
        raise UnsupportedConfigurationError(
            "tunnel splitting is defined at zero field; use sweep.locate_matchings for H > 0"
        )
    ham = assemble(params, kmax)
    lows = {"even": math.inf, "odd": math.inf}
    for key, (block, _) in ham.blocks().items():
        harmonics = key.partition("/")[2]
        lows[harmonics] = min(lows[harmonics], lowest_eigenvalue(block))
    return abs(lows["odd"] - lows["even"])
