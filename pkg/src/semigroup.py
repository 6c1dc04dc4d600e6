"""
Semi-groupes de la chaleur W_t et de Poisson P_t sur les suites.

Le semi-groupe est évalué exactement via le noyau K_t (ou l'exponentielle de
la matrice de Jacobi tronquée), jamais par intégration en temps.
"""

import math
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from .errors import ConvergenceError, ValidationError
from .jacobi_core import (
    FiniteSequence,
    JacobiParams,
    apply_delta,
    apply_jacobi_operator,
    coefficient_table,
    recurrence_table,
)
from .kernel import DEFAULT_KERNEL_TOL, heat_kernel_block, poisson_kernel_block
from .quadrature import gauss_laguerre_rule, tridiagonal_eigen

DEFAULT_POISSON_NODES = 256
NEGLIGIBLE_WEIGHT = 1e-18
POISSON_EXPONENT = -0.5
POISSON_METHODS = ("kernel", "subordination")
DEFAULT_GRID_POINTS = 60
PDE_STEP = 1e-4
ENERGY_STEP = 1e-3


def default_truncation(f: FiniteSequence, t: float) -> int:
    """Troncature par défaut : support(f) + ⌈10 √(t+1)⌉ + 40."""
    return f.support + math.ceil(10.0 * math.sqrt(t + 1.0)) + 40


def _check_time(t: float) -> float:
    if not np.isfinite(t) or t < 0:
        raise ValidationError(f"Temps invalide : {t} (réel ≥ 0 attendu)")
    return float(t)


def _resolve_truncation(f: FiniteSequence, t: float, truncation: Optional[int]) -> int:
    if truncation is None:
        return default_truncation(f, t)
    if truncation < f.support:
        raise ValidationError(
            f"Troncature {truncation} inférieure au support de f ({f.support})"
        )
    return int(truncation)


# ---------------------------------------------------------------------------
# Matrices de Jacobi générales
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class GeneralJacobiMatrix:
    """
    Matrice de Jacobi bornée (a > 0 hors diagonale, b sur la diagonale).

    Attributes:
        a: Coefficients hors diagonale a_0..a_N
        b: Coefficients diagonaux b_0..b_N
        spectral_sup: Maximum s du support spectral, déclaré par l'appelant
    """

    a: np.ndarray
    b: np.ndarray
    spectral_sup: float
    _decompositions: Dict[int, Tuple[np.ndarray, np.ndarray]] = field(
        default_factory=dict, init=False, repr=False
    )
    _lock: threading.Lock = field(default_factory=threading.Lock, init=False, repr=False)

    def __post_init__(self):
        a = np.array(self.a, dtype=float).ravel()
        b = np.array(self.b, dtype=float).ravel()
        if a.size != b.size or a.size == 0:
            raise ValidationError("Les tableaux a et b doivent avoir la même longueur")
        if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
            raise ValidationError("Coefficients de Jacobi non finis")
        if np.any(a <= 0.0):
            raise ValidationError("Les coefficients a_n doivent être > 0")
        if not np.isfinite(self.spectral_sup):
            raise ValidationError("Maximum du support spectral non fini")
        a.setflags(write=False)
        b.setflags(write=False)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @classmethod
    def from_params(cls, params: JacobiParams, cutoff: int) -> "GeneralJacobiMatrix":
        """Matrice des polynômes de Jacobi : s = 1, donc s⁺ = 1."""
        table = coefficient_table(params, cutoff)
        return cls(table.a, table.b, 1.0)

    @property
    def cutoff(self) -> int:
        return self.b.size - 1

    @property
    def s_plus(self) -> float:
        return max(self.spectral_sup, 0.0)

    def decomposition(self, size: int) -> Tuple[np.ndarray, np.ndarray]:
        """Valeurs et vecteurs propres de la troncature size × size (en cache)."""
        if size < 1 or size > self.b.size:
            raise ValidationError(
                f"Taille de troncature {size} hors de [1, {self.b.size}]"
            )
        with self._lock:
            cached = self._decompositions.get(size)
        if cached is not None:
            return cached
        result = tridiagonal_eigen(self.b[:size], self.a[: size - 1], vectors=True)
        pair = (result.values, result.vectors)
        with self._lock:
            self._decompositions[size] = pair
        return pair

    def apply(self, f: FiniteSequence, shifted: bool = True) -> FiniteSequence:
        """Applique J (ou 𝒥 = J − s⁺I) à une suite de support < cutoff."""
        S = f.support
        if S + 1 > self.cutoff:
            raise ValidationError("Support de f trop grand pour la matrice tronquée")
        fv = f.values
        g = np.zeros(S + 2)
        g[: S + 1] += (self.b[: S + 1] - (self.s_plus if shifted else 0.0)) * fv
        g[1:] += self.a[: S + 1] * fv
        g[:S] += self.a[:S] * fv[1:]
        return FiniteSequence(g)


def matrix_exponential_kernel(J: GeneralJacobiMatrix, t: float, N: int) -> np.ndarray:
    """
    e^{t(J_N − s⁺ I)} par décomposition spectrale de la troncature J_N.

    Returns:
        Matrice N × N symétrique (identité exacte en t = 0)
    """
    t = _check_time(t)
    if t == 0.0:
        return np.eye(N)
    values, vectors = J.decomposition(N)
    result = (vectors * np.exp(t * (values - J.s_plus))) @ vectors.T
    return np.triu(result) + np.triu(result, 1).T


def measure_heat_kernel(
    J: GeneralJacobiMatrix,
    nodes: np.ndarray,
    weights: np.ndarray,
    t: float,
    size: int,
) -> np.ndarray:
    """
    K_t(m, n) = Σ_i w_i e^{(x_i − s⁺)t} p_m(x_i) p_n(x_i) pour une mesure
    discrète fournie par l'utilisateur, les p_n suivant la récurrence de J.

    Raises:
        ValidationError: Si nœuds et poids sont incohérents
    """
    t = _check_time(t)
    nodes = np.asarray(nodes, dtype=float).ravel()
    weights = np.asarray(weights, dtype=float).ravel()
    if nodes.size == 0 or nodes.size != weights.size:
        raise ValidationError("Nœuds et poids de tailles incohérentes")
    if np.any(weights <= 0.0) or not np.all(np.isfinite(nodes)):
        raise ValidationError("Poids non positifs ou nœuds non finis")
    if size > J.cutoff:
        raise ValidationError(f"Taille {size} au-delà du cutoff {J.cutoff}")

    p0 = 1.0 / math.sqrt(float(np.sum(weights)))
    table = recurrence_table(J.a, J.b, p0, size, nodes)
    scaled = table * np.sqrt(weights * np.exp((nodes - J.s_plus) * t))
    result = scaled @ scaled.T
    return np.triu(result) + np.triu(result, 1).T


# ---------------------------------------------------------------------------
# Grilles de temps et traces
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TimeGrid:
    """Temps finis, ≥ 0, strictement croissants ; grille non vide."""

    times: Tuple[float, ...]

    def __post_init__(self):
        times = tuple(float(t) for t in self.times)
        if not times:
            raise ValidationError("Grille de temps vide")
        if not all(np.isfinite(t) and t >= 0 for t in times):
            raise ValidationError("Les temps doivent être finis et ≥ 0")
        if any(b <= a for a, b in zip(times, times[1:])):
            raise ValidationError("Les temps doivent être strictement croissants")
        object.__setattr__(self, "times", times)

    @classmethod
    def logarithmic(cls, start: float = 1e-3, stop: float = 1e3,
                    count: int = DEFAULT_GRID_POINTS) -> "TimeGrid":
        if start <= 0 or stop <= start or count < 1:
            raise ValidationError("Grille logarithmique invalide")
        if count == 1:
            return cls((start,))
        return cls(tuple(np.geomspace(start, stop, count)))

    def refined(self) -> "TimeGrid":
        """Insère un point entre chaque paire (moyenne géométrique) ; sur-grille."""
        points = [self.times[0]]
        for left, right in zip(self.times, self.times[1:]):
            middle = math.sqrt(left * right) if left > 0 else 0.5 * right
            points.extend([middle, right])
        return TimeGrid(tuple(points))

    def __len__(self) -> int:
        return len(self.times)

    def __iter__(self):
        return iter(self.times)


@dataclass
class EvolutionTrace:
    """États u(·, t) = W_t f et énergies E(t) = ½ Σ u(n, t)² le long d'une grille."""

    times: Tuple[float, ...]
    states: List[FiniteSequence]
    energies: np.ndarray
    residuals: Optional[np.ndarray] = None

    def dissipation_rates(self) -> np.ndarray:
        """(E(t_{i+1}) − E(t_i)) / (t_{i+1} − t_i)."""
        return np.diff(self.energies) / np.diff(np.asarray(self.times))

    def is_non_increasing(self, slack: float = 1e-10) -> bool:
        return bool(np.all(np.diff(self.energies) <= slack))

    def to_frame(self) -> pd.DataFrame:
        rows = []
        for t, state in zip(self.times, self.states):
            for n, value in enumerate(state.values):
                rows.append({"t": t, "n": n, "value": float(value)})
        return pd.DataFrame(rows)

# ---------------------------------------------------------------------------
# Opérateurs de la chaleur et de Poisson
# ---------------------------------------------------------------------------

def apply_heat(
    params: JacobiParams,
    t: float,
    f: FiniteSequence,
    truncation: Optional[int] = None,
    tol: float = DEFAULT_KERNEL_TOL,
) -> FiniteSequence:
    """
    W_t f(n) = Σ_{m ≤ support(f)} f(m) K_t(m, n), pour 0 ≤ n ≤ truncation.

    Args:
        params: Paramètres (α, β)
        t: Temps ≥ 0
        f: Suite à support fini
        truncation: Dernier indice calculé (défaut : default_truncation)
        tol: Tolérance de convergence du noyau

    Raises:
        ValidationError: Si t < 0 ou truncation < support(f)
        ConvergenceError: Si le noyau ne converge pas
    """
    t = _check_time(t)
    truncation = _resolve_truncation(f, t, truncation)
    if f.is_zero():
        return FiniteSequence.zeros(truncation)
    block = heat_kernel_block(params, t, f.support, truncation, tol)
    return FiniteSequence(f.values @ block)


def apply_poisson(
    params: JacobiParams,
    t: float,
    f: FiniteSequence,
    truncation: Optional[int] = None,
    nodes: int = DEFAULT_POISSON_NODES,
    tol: float = DEFAULT_KERNEL_TOL,
    method: str = "subordination",
) -> FiniteSequence:
    """
    P_t f = (1/√π) ∫_0^∞ e^{−u} u^{−1/2} W_{t²/(4u)} f du.

    Args:
        nodes: Nœuds de Gauss–Laguerre (256 par défaut : erreur ~1e-7 sur
            δ_0 ; 64 nœuds laissent ~3e-5)
        method: "subordination" (défaut) évalue l'intégrale en u par
            Gauss–Laguerre généralisée d'exposant −1/2, une application de W
            par nœud de poids non négligeable ; "kernel" somme f contre le
            noyau de Poisson `poisson_kernel_block`, sans erreur de
            subordination.

    Raises:
        ValidationError: Si t < 0, truncation < support(f) ou méthode inconnue
    """
    t = _check_time(t)
    truncation = _resolve_truncation(f, t, truncation)
    if method not in POISSON_METHODS:
        raise ValidationError(f"Méthode de Poisson inconnue : {method}")
    if t == 0.0:
        return FiniteSequence(f.padded(truncation + 1))
    if f.is_zero():
        return FiniteSequence.zeros(truncation)
    if method == "kernel":
        block = poisson_kernel_block(params, t, f.support, truncation, tol)
        return FiniteSequence(f.values @ block)

    rule = gauss_laguerre_rule(POISSON_EXPONENT, nodes)
    total = np.zeros(truncation + 1)
    for u, weight in zip(rule.nodes, rule.weights):
        # les W_s f sont bornés par ‖f‖₂ : ces nœuds ne comptent pas
        if weight < NEGLIGIBLE_WEIGHT:
            continue
        state = apply_heat(params, t * t / (4.0 * u), f, truncation, tol)
        total += weight * state.values
    return FiniteSequence(total / math.sqrt(math.pi))


def heat_on_bounded(
    params: JacobiParams,
    t: float,
    f: Callable[[np.ndarray], np.ndarray],
    n_max: int,
    tol: float = 1e-10,
    max_doublings: int = 6,
) -> FiniteSequence:
    """
    Extension de W_t aux suites bornées : Σ_m f(m) K_t(m, n) pour n ≤ n_max,
    la somme en m étant tronquée puis doublée jusqu'à stabilisation.

    Args:
        f: Fonction vectorisée des indices m, bornée
    """
    t = _check_time(t)
    limit = n_max + math.ceil(10.0 * math.sqrt(t + 1.0)) + 40
    previous = None
    for _ in range(max_doublings + 1):
        values = np.asarray(f(np.arange(limit + 1)), dtype=float)
        block = heat_kernel_block(params, t, limit, n_max)
        current = values @ block
        if previous is not None and np.max(np.abs(current - previous)) <= tol:
            return FiniteSequence(current)
        previous = current
        limit *= 2
    raise ConvergenceError(
        f"Somme sur ℓ^∞ non stabilisée après {max_doublings} doublements"
    )


def _map_times(job: Callable[[float], np.ndarray], times: Sequence[float],
               threads: int) -> List[np.ndarray]:
    if threads <= 1:
        return [job(t) for t in times]
    with ThreadPoolExecutor(max_workers=threads) as executor:
        return list(executor.map(job, times))


def maximal_heat_sequence(
    params: JacobiParams,
    f: FiniteSequence,
    grid: TimeGrid,
    truncation: Optional[int] = None,
    include_endpoint: bool = True,
    threads: int = 1,
) -> np.ndarray:
    """
    max_{t ∈ grille} |W_t f(n)| pour 0 ≤ n ≤ truncation.

    Avec include_endpoint, la limite t → 0⁺ (|f(n)|, par continuité forte)
    participe au maximum.
    """
    truncation = _resolve_truncation(f, grid.times[-1], truncation)

    def job(t: float) -> np.ndarray:
        return np.abs(apply_heat(params, t, f, truncation).values)

    return _pointwise_max(f, truncation, _map_times(job, grid.times, threads),
                          include_endpoint)


def maximal_poisson_sequence(
    params: JacobiParams,
    f: FiniteSequence,
    grid: TimeGrid,
    truncation: Optional[int] = None,
    include_endpoint: bool = True,
    threads: int = 1,
    nodes: int = DEFAULT_POISSON_NODES,
    method: str = "subordination",
) -> np.ndarray:
    """max_{t ∈ grille} |P_t f(n)| pour 0 ≤ n ≤ truncation."""
    truncation = _resolve_truncation(f, grid.times[-1], truncation)

    def job(t: float) -> np.ndarray:
        state = apply_poisson(params, t, f, truncation, nodes, method=method)
        return np.abs(state.values)

    return _pointwise_max(f, truncation, _map_times(job, grid.times, threads),
                          include_endpoint)


def _pointwise_max(f: FiniteSequence, truncation: int, states: List[np.ndarray],
                   include_endpoint: bool) -> np.ndarray:
    result = np.max(np.vstack(states), axis=0)
    if include_endpoint:
        result = np.maximum(result, np.abs(f.padded(truncation + 1)))
    return result


def maximal_heat(params: JacobiParams, f: FiniteSequence, n: int, grid: TimeGrid,
                 include_endpoint: bool = True) -> float:
    """W_* f(n) approché sur la grille."""
    truncation = max(n, default_truncation(f, grid.times[-1]))
    return float(maximal_heat_sequence(params, f, grid, truncation, include_endpoint)[n])


def maximal_poisson(params: JacobiParams, f: FiniteSequence, n: int, grid: TimeGrid,
                    include_endpoint: bool = True,
                    nodes: int = DEFAULT_POISSON_NODES,
                    method: str = "subordination") -> float:
    """P_* f(n) approché sur la grille."""
    truncation = max(n, default_truncation(f, grid.times[-1]))
    return float(maximal_poisson_sequence(
        params, f, grid, truncation, include_endpoint, nodes=nodes, method=method
    )[n])


# ---------------------------------------------------------------------------
# Diagnostics : équation, énergie, loi de semi-groupe
# ---------------------------------------------------------------------------

def energy(u: FiniteSequence) -> float:
    """E = ½ Σ u(n)²."""
    return 0.5 * float(np.dot(u.values, u.values))


def pde_residual(
    params: JacobiParams,
    f: FiniteSequence,
    t: float,
    h: float = PDE_STEP,
    truncation: Optional[int] = None,
) -> float:
    """‖(W_{t+h} f − W_t f)/h − 𝒥 W_t f‖₂ sur les indices 0..truncation."""
    truncation = _resolve_truncation(f, t + h, truncation)
    state = apply_heat(params, t, f, truncation + 1)
    later = apply_heat(params, t + h, f, truncation)
    generator = apply_jacobi_operator(params, state, shifted=True).values[: truncation + 1]
    quotient = (later.values - state.values[: truncation + 1]) / h
    return float(np.linalg.norm(quotient - generator))


def evolve_ivp(
    params: JacobiParams,
    f: FiniteSequence,
    grid: TimeGrid,
    truncation: Optional[int] = None,
    check_pde: bool = True,
    h: float = PDE_STEP,
) -> EvolutionTrace:
    """
    Solution u(n, t) = W_t f(n) de ∂_t u = 𝒥 u, u(·, 0) = f, aux temps de la grille.

    Chaque état est calculé indépendamment (pas d'intégration en temps).
    """
    truncation = _resolve_truncation(f, grid.times[-1], truncation)
    states = [apply_heat(params, t, f, truncation) for t in grid.times]
    energies = np.array([energy(state) for state in states])
    residuals = None
    if check_pde:
        residuals = np.array([
            pde_residual(params, f, t, h, truncation) for t in grid.times
        ])
    return EvolutionTrace(grid.times, states, energies, residuals)


def energy_rate(
    params: JacobiParams,
    f: FiniteSequence,
    t: float,
    h: float = ENERGY_STEP,
    truncation: Optional[int] = None,
) -> Tuple[float, float]:
    """
    Dérivée de E(t) par différences finies d'ordre 4, et −Σ (δu(n, t))².

    Returns:
        (taux par différences finies, dissipation exacte)
    """
    t = _check_time(t)
    truncation = _resolve_truncation(f, t + 4 * h, truncation)

    def energy_at(s: float) -> float:
        return energy(apply_heat(params, s, f, truncation))

    if t >= 2 * h:
        samples = [energy_at(t + k * h) for k in (-2, -1, 1, 2)]
        rate = (samples[0] - 8 * samples[1] + 8 * samples[2] - samples[3]) / (12 * h)
    else:
        samples = [energy_at(t + k * h) for k in range(5)]
        rate = (
            -25 * samples[0] + 48 * samples[1] - 36 * samples[2]
            + 16 * samples[3] - 3 * samples[4]
        ) / (12 * h)

    state = apply_heat(params, t, f, truncation)
    dissipation = -float(np.sum(apply_delta(params, state).values ** 2))
    return rate, dissipation


def chapman_kolmogorov_check(
    params: JacobiParams, t1: float, t2: float, n: int, j: int, truncation: int
) -> float:
    """|Σ_{m ≤ truncation} K_{t1}(m, n) K_{t2}(m, j) − K_{t1+t2}(n, j)|."""
    t1, t2 = _check_time(t1), _check_time(t2)
    first = heat_kernel_block(params, t1, truncation, n)[:, n]
    second = heat_kernel_block(params, t2, truncation, j)[:, j]
    lo, hi = sorted((n, j))
    combined = heat_kernel_block(params, t1 + t2, lo, hi)[lo, hi]
    return abs(float(np.dot(first, second)) - float(combined))


def semigroup_law_residual(
    params: JacobiParams, f: FiniteSequence, t1: float, t2: float, truncation: int
) -> float:
    """‖W_{t1}(W_{t2} f) − W_{t1+t2} f‖₂ sur 0..truncation."""
    inner = apply_heat(params, t2, f, truncation)
    composed = apply_heat(params, t1, inner, truncation)
    direct = apply_heat(params, t1 + t2, f, truncation)
    return (composed - direct).norm()


def strong_continuity_profile(
    params: JacobiParams, f: FiniteSequence, k_max: int = 20,
    truncation: Optional[int] = None,
) -> np.ndarray:
    """‖W_{2^{−k}} f − f‖₂ pour k = 0..k_max."""
    truncation = _resolve_truncation(f, 1.0, truncation)
    return np.array([
        (apply_heat(params, 2.0 ** (-k), f, truncation) - f).norm()
        for k in range(k_max + 1)
    ])
