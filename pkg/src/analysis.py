"""
Analyseur empirique des estimations de noyau et des inégalités maximales.

Constantes de taille et de régularité du noyau (type Calderón–Zygmund),
borne uniforme des p_n, constantes de Muckenhoupt discrètes A_p, normes
ℓ^p pondérées et ℓ^{1,∞}, et expériences sur les opérateurs maximaux.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from .errors import ValidationError
from .jacobi_core import FiniteSequence, JacobiParams, normalization_constant, orthonormal_table
from .kernel import heat_kernel_block, poisson_kernel_block
from .semigroup import TimeGrid, default_truncation

BOUND_KINDS = ("lemma31", "lemma41", "cz_a", "lemma42", "cz_b1", "cz_b2", "unif_pn")
DEFAULT_TIME_GRID = (1e-2, 1e2, 60)
STABILIZATION_RATIO = 1.1
EDGE_LEVELS = 40


@dataclass(frozen=True)
class WeightSeq:
    """
    Poids strictement positif sur ℕ (tronqué à N + 1 valeurs).

    Attributes:
        values: Valeurs w(0), ..., w(N)
        descriptor: Description du poids (ex. {"kind": "power", "gamma": 0.3})
    """

    values: np.ndarray
    descriptor: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        values = np.array(self.values, dtype=float).ravel()
        if values.size == 0 or not np.all(np.isfinite(values)) or np.any(values <= 0):
            raise ValidationError("Un poids doit être une suite strictement positive")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @classmethod
    def unit(cls, N: int) -> "WeightSeq":
        return cls(np.ones(N + 1), {"kind": "unit"})

    @classmethod
    def power(cls, gamma: float, N: int) -> "WeightSeq":
        """w(n) = (n + 1)^γ."""
        return cls(np.arange(1, N + 2, dtype=float) ** gamma, {"kind": "power", "gamma": gamma})

    @property
    def length(self) -> int:
        return self.values.size

    def head(self, length: int) -> np.ndarray:
        if length > self.values.size:
            raise ValidationError(
                f"Poids trop court : {self.values.size} valeurs, {length} requises"
            )
        return self.values[:length]


@dataclass
class BoundReport:
    """Constante empirique C d'une estimation, avec son point de réalisation."""

    bound_kind: str
    estimated_constant: float
    argmax: Tuple
    ranges: Dict[str, Any]
    extras: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if not np.isfinite(self.estimated_constant) or self.estimated_constant < 0:
            raise ValidationError(
                f"Constante estimée invalide : {self.estimated_constant}"
            )

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


# ---------------------------------------------------------------------------
# Constantes des estimations du noyau
# ---------------------------------------------------------------------------

def _positive_times(grid: TimeGrid) -> List[float]:
    times = [t for t in grid.times if t > 0]
    if not times:
        raise ValidationError("La grille de temps ne contient aucun t > 0")
    return times


def _local_mask(indices: np.ndarray) -> np.ndarray:
    """Masque [n, m] de la région locale m/2 ≤ n ≤ 3m/2, n ≠ m."""
    n = indices[:, None]
    m = indices[None, :]
    return (2 * n >= m) & (2 * n <= 3 * m) & (n != m)


def estimate_bound_constant(
    bound_kind: str,
    params: JacobiParams,
    index_range: Tuple[int, int],
    time_grid: TimeGrid,
) -> BoundReport:
    """
    Supremum empirique du rapport définissant une estimation du noyau.

    Args:
        bound_kind: lemma31 (|K|·|m−n|²/√t), lemma41 et cz_a (|K|·|n−m|),
            lemma42 (|K(n+1,m) − K(n,m)|·|n−m|²), cz_b1 et cz_b2
            (|K(n,m) − K(l,m)|·|n−m|²/|n−l|, avec le majorant télescopique)
        params: Paramètres (α, β), dans le cadre α, β ≥ −1/2
        index_range: Bornes (lo, hi) communes à n et m
        time_grid: Grille des temps (les t = 0 sont ignorés)

    Raises:
        ValidationError: Hors cadre α, β ≥ −1/2, type inconnu, ou ensemble
            admissible vide après filtrage
    """
    if bound_kind not in BOUND_KINDS or bound_kind == "unif_pn":
        raise ValidationError(f"Type d'estimation inconnu : {bound_kind}")
    if not params.standard_range:
        raise ValidationError("Les estimations de noyau exigent α, β ≥ −1/2")
    lo, hi = int(index_range[0]), int(index_range[1])
    if lo < 0 or hi < lo:
        raise ValidationError(f"Intervalle d'indices invalide : {index_range}")

    indices = np.arange(lo, hi + 1)
    n_idx = indices[:, None]
    m_idx = indices[None, :]
    distance = np.abs(n_idx - m_idx).astype(float)
    times = _positive_times(time_grid)
    ranges = {
        "index_range": [lo, hi],
        "t_min": times[0],
        "t_max": times[-1],
        "t_count": len(times),
    }

    if bound_kind in ("lemma31", "lemma41", "cz_a"):
        mask = n_idx != m_idx
    elif bound_kind == "lemma42":
        mask = _local_mask(indices)
    else:
        return _cz_smoothness(bound_kind, params, indices, times, ranges)
    if not np.any(mask):
        raise ValidationError("Ensemble admissible vide après filtrage")

    best, best_arg = -1.0, None
    for t in times:
        block = heat_kernel_block(params, t, hi + 1, hi + 1)
        sub = block[lo: hi + 1, lo: hi + 1]
        if bound_kind == "lemma31":
            ratio = np.abs(sub) * distance**2 / math.sqrt(t)
        elif bound_kind == "lemma42":
            diff = block[lo + 1: hi + 2, lo: hi + 1] - sub
            ratio = np.abs(diff) * distance**2
        else:
            ratio = np.abs(sub) * distance
        ratio = np.where(mask, ratio, -1.0)
        i, j = np.unravel_index(int(np.argmax(ratio)), ratio.shape)
        if ratio[i, j] > best:
            best = float(ratio[i, j])
            best_arg = (int(indices[i]), int(indices[j]), float(t))
    return BoundReport(bound_kind, best, best_arg, ranges)


def _cz_smoothness(
    bound_kind: str,
    params: JacobiParams,
    indices: np.ndarray,
    times: List[float],
    ranges: Dict[str, Any],
) -> BoundReport:
    """
    Régularité locale : triplets (n, l, m) avec |n − m| > 2|n − l|,
    m/2 ≤ n, l ≤ 3m/2 et l ≠ n.
    """
    lo, hi = int(indices[0]), int(indices[-1])
    n = indices[:, None, None]
    l = indices[None, :, None]
    m = indices[None, None, :]
    mask = (
        (np.abs(n - m) > 2 * np.abs(n - l))
        & (2 * n >= m) & (2 * n <= 3 * m)
        & (2 * l >= m) & (2 * l <= 3 * m)
        & (l != n)
    )
    if not np.any(mask):
        raise ValidationError("Ensemble admissible vide après filtrage")
    factor = np.where(mask, (n - m).astype(float) ** 2 / np.maximum(np.abs(n - l), 1), 0.0)

    sup_diff = np.zeros((indices.size, indices.size, indices.size))
    sup_step = np.zeros((indices.size, indices.size))
    for t in times:
        # K_t symétrique : (b2) coïncide avec (b1), évaluée sur le même bloc
        block = heat_kernel_block(params, t, hi + 1, hi + 1)
        sub = block[lo: hi + 1, lo: hi + 1]
        np.maximum(sup_diff, np.abs(sub[:, None, :] - sub[None, :, :]), out=sup_diff)
        step = block[lo + 1: hi + 2, lo: hi + 1] - sub
        np.maximum(sup_step, np.abs(step), out=sup_step)

    ratio = np.where(mask, sup_diff * factor, -1.0)
    flat = int(np.argmax(ratio))
    i, j, k = np.unravel_index(flat, ratio.shape)
    best = float(ratio[i, j, k])

    # Majorant : Σ_j sup_t |K_t(j+1, m) − K_t(j, m)| le long de [min(n,l), max(n,l))
    cumulative = np.vstack([np.zeros((1, indices.size)), np.cumsum(sup_step, axis=0)])
    a, b = min(i, j), max(i, j)
    telescoped = float((cumulative[b, k] - cumulative[a, k]) * factor[i, j, k])
    return BoundReport(
        bound_kind,
        best,
        (int(indices[i]), int(indices[j]), int(indices[k])),
        ranges,
        {"telescoped_majorant": telescoped},
    )


def default_x_grid(n_max: int, edge_levels: int = EDGE_LEVELS) -> np.ndarray:
    """Grille x = cos θ (θ uniforme) complétée par ±(1 − 2^{−k})."""
    count = max(2000, 20 * (n_max + 1))
    theta = np.linspace(0.0, math.pi, count + 2)[1:-1]
    edges = 1.0 - 2.0 ** -np.arange(1, edge_levels + 1)
    return np.unique(np.concatenate([np.cos(theta), edges, -edges]))


def uniform_pn_bound_constant(
    params: JacobiParams,
    n_range: Tuple[int, int],
    x_grid: Optional[np.ndarray] = None,
) -> BoundReport:
    """
    sup |p_n(x)| (1−x)^{α/2+1/4} (1+x)^{β/2+1/4} sur la grille, n dans n_range.

    Raises:
        ValidationError: Si α ou β < −1/2, ou si la grille touche ±1
    """
    if not params.standard_range:
        raise ValidationError("La borne uniforme exige α, β ≥ −1/2")
    lo, hi = int(n_range[0]), int(n_range[1])
    x = default_x_grid(hi) if x_grid is None else np.asarray(x_grid, dtype=float)
    if np.any(np.abs(x) >= 1.0):
        raise ValidationError("La grille en x doit éviter ±1")

    envelope = (1.0 - x) ** (params.alpha / 2 + 0.25) * (1.0 + x) ** (params.beta / 2 + 0.25)
    weighted = np.abs(orthonormal_table(params, hi, x)[lo:]) * envelope
    i, j = np.unravel_index(int(np.argmax(weighted)), weighted.shape)
    return BoundReport(
        "unif_pn",
        float(weighted[i, j]),
        (lo + int(i), float(x[j])),
        {"n_range": [lo, hi], "x_count": int(x.size), "x_min": float(x.min()),
         "x_max": float(x.max())},
    )


def w_ratio_limit_check(params: JacobiParams, n: int) -> float:
    """n (w_{n+1}/w_n − 1), qui tend vers 1/2."""
    return n * (normalization_constant(params, n + 1) / normalization_constant(params, n) - 1.0)


# ---------------------------------------------------------------------------
# Poids de Muckenhoupt et normes pondérées
# ---------------------------------------------------------------------------

def ap_constant(w: WeightSeq, p: float, N: int) -> float:
    """
    Constante A_p tronquée : sup sur 0 ≤ n ≤ m ≤ N de
    moy(w) · moy(w^{−1/(p−1)})^{p−1} (p > 1), ou moy(w) · max(1/w) (p = 1).

    Évaluation exacte en O(N²) par sommes préfixes.
    """
    if p < 1:
        raise ValidationError(f"Exposant p invalide : {p} (p ≥ 1 attendu)")
    values = w.head(N + 1)
    prefix = np.concatenate([[0.0], np.cumsum(values)])
    if p > 1:
        dual = values ** (-1.0 / (p - 1.0))
        dual_prefix = np.concatenate([[0.0], np.cumsum(dual)])

    best = 0.0
    for n in range(N + 1):
        counts = np.arange(1, N - n + 2, dtype=float)
        average = (prefix[n + 1:] - prefix[n]) / counts
        if p > 1:
            dual_average = (dual_prefix[n + 1:] - dual_prefix[n]) / counts
            candidate = average * dual_average ** (p - 1.0)
        else:
            candidate = average / np.minimum.accumulate(values[n:])
        best = max(best, float(np.max(candidate)))
    return best


def ap_stabilization(
    weight_factory: Callable[[int], WeightSeq], p: float, N: int
) -> Dict[str, Any]:
    """
    Compare A_p tronquée en N et 2N ; le poids est jugé dans A_p si le rapport
    reste sous STABILIZATION_RATIO.
    """
    first = ap_constant(weight_factory(N), p, N)
    second = ap_constant(weight_factory(2 * N), p, 2 * N)
    ratio = second / first
    return {
        "p": p,
        "N": N,
        "constant_N": first,
        "constant_2N": second,
        "ratio": ratio,
        "stable": bool(ratio < STABILIZATION_RATIO),
    }


def _as_values(f) -> np.ndarray:
    return f.values if isinstance(f, FiniteSequence) else np.asarray(f, dtype=float)


def weighted_lp_norm(f, w: WeightSeq, p: float) -> float:
    """‖f‖_{ℓ^p(w)} = (Σ |f(n)|^p w(n))^{1/p}."""
    if p < 1:
        raise ValidationError(f"Exposant p invalide : {p}")
    values = np.abs(_as_values(f))
    return float(np.sum(values**p * w.head(values.size)) ** (1.0 / p))


def weak_l1_norm(f, w: WeightSeq) -> float:
    """
    ‖f‖_{ℓ^{1,∞}(w)} = sup_{t>0} t Σ_{|f(n)|>t} w(n), atteint en t → v⁻ pour
    une valeur v de |f| : max_v v · w({|f| ≥ v}).
    """
    values = np.abs(_as_values(f))
    weights = w.head(values.size)
    order = np.argsort(-values, kind="stable")
    sorted_values = values[order]
    mass = np.cumsum(weights[order])
    # Pour chaque valeur, la masse de {|f| ≥ v} est celle du dernier ex æquo
    last = np.searchsorted(-sorted_values, -sorted_values, side="right") - 1
    candidates = sorted_values * mass[last]
    return float(np.max(candidates)) if candidates.size else 0.0


# ---------------------------------------------------------------------------
# Expériences sur les inégalités maximales
# ---------------------------------------------------------------------------

@dataclass
class MaximalExperimentReport:
    """Rapports max ‖T_* f‖ / ‖f‖ sur un jeu de suites (chaleur et Poisson)."""

    p: float
    heat_ratio: float
    poisson_ratio: Optional[float]
    heat_ratios: List[float]
    poisson_ratios: List[Optional[float]]
    skipped: int
    metadata: Dict[str, Any]

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


def _stack(test_set: Sequence[FiniteSequence]) -> np.ndarray:
    support = max(f.support for f in test_set)
    return np.vstack([f.padded(support + 1) for f in test_set])


def _batched_maximal(
    params: JacobiParams,
    F: np.ndarray,
    times: Sequence[float],
    truncation: int,
    poisson: bool,
    threads: int,
) -> np.ndarray:
    support = F.shape[1] - 1
    block = poisson_kernel_block if poisson else heat_kernel_block

    def job(t: float) -> np.ndarray:
        return np.abs(F @ block(params, t, support, truncation))

    if threads <= 1:
        states = [job(t) for t in times]
    else:
        with ThreadPoolExecutor(max_workers=threads) as executor:
            states = list(executor.map(job, times))

    result = np.max(np.stack(states), axis=0)
    # Limite t → 0⁺ : |f(n)|
    endpoint = np.abs(np.pad(F, ((0, 0), (0, truncation - support))))
    return np.maximum(result, endpoint)


def maximal_inequality_experiment(
    params: JacobiParams,
    w: WeightSeq,
    p: float,
    test_set: Sequence[FiniteSequence],
    grid: TimeGrid,
    truncation: Optional[int] = None,
    include_poisson: bool = True,
    threads: int = 1,
) -> MaximalExperimentReport:
    """
    max sur le jeu de ‖W_* f‖_{ℓ^p(w)} / ‖f‖_{ℓ^p(w)} (p > 1) ou
    ‖W_* f‖_{ℓ^{1,∞}(w)} / ‖f‖_{ℓ^1(w)} (p = 1), et de même pour P_*.

    Les suites nulles sont ignorées (rapport 0).
    """
    if p < 1:
        raise ValidationError(f"Exposant p invalide : {p}")
    active = [f for f in test_set if not f.is_zero()]
    skipped = len(test_set) - len(active)
    metadata = {
        "alpha": params.alpha,
        "beta": params.beta,
        "weight": w.descriptor,
        "grid": {"t_min": grid.times[0], "t_max": grid.times[-1], "count": len(grid)},
    }
    if not active:
        return MaximalExperimentReport(p, 0.0, 0.0 if include_poisson else None,
                                       [], [], skipped, metadata)

    F = _stack(active)
    if truncation is None:
        truncation = default_truncation(FiniteSequence(F[0]), grid.times[-1])
    truncation = max(truncation, F.shape[1] - 1)
    metadata["truncation"] = truncation

    def ratios(maximal: np.ndarray) -> List[float]:
        out = []
        for row, f in zip(maximal, active):
            if p == 1:
                out.append(weak_l1_norm(row, w) / weighted_lp_norm(f, w, 1.0))
            else:
                out.append(weighted_lp_norm(row, w, p) / weighted_lp_norm(f, w, p))
        return out

    heat = ratios(_batched_maximal(params, F, grid.times, truncation, False, threads))
    poisson: List[Optional[float]] = [None] * len(active)
    poisson_max = None
    if include_poisson:
        poisson = ratios(_batched_maximal(params, F, grid.times, truncation, True, threads))
        poisson_max = float(max(poisson))
    return MaximalExperimentReport(
        p, float(max(heat)), poisson_max, heat, poisson, skipped, metadata
    )
