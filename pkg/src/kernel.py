"""
Noyau de la chaleur K_t(m, n) et structures associées.

Contenu du module :
- K_t(m, n) = ∫ e^{−(1−x)t} p_m(x) p_n(x) dμ_{α,β}(x) par quadrature convergée ;
- noyau de Poisson par le changement de variable y = √(1−x) ;
- forme close de Chebyshev (α = β = −1/2) via les fonctions de Bessel modifiées ;
- intégrales 𝔍_t et leurs récurrences (cas a, b, c) ;
- coefficients de linéarisation p_m p_n = Σ c(k, m, n) p_k ;
- coefficients h_t(k), translation τ_n et convolution.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from .bessel import modified_bessel_i_scaled
from .errors import ConvergenceError, ValidationError
from .jacobi_core import (
    FiniteSequence,
    JacobiParams,
    eval_jacobi_p,
    log_total_mass,
    normalization_constant,
    orthonormal_table,
)
from .quadrature import (
    HEURISTIC_MARGIN,
    bucketed,
    gauss_jacobi_rule,
    gauss_laguerre_rule,
    node_count_heuristic,
)

DEFAULT_KERNEL_TOL = 1e-12
DEFAULT_FRAK_TOL = 1e-12
MAX_DOUBLINGS = 4
MAX_RULE_NODES = 2048
ENDPOINT_REGIME_TIME = 50.0
LAGUERRE_TAIL_EXPONENT = 40.0
H_T_THRESHOLD = 1e-15
MAX_H_T_INDEX = 10_000


def _check_time(t: float) -> float:
    if not np.isfinite(t) or t < 0:
        raise ValidationError(f"Temps invalide : {t} (réel ≥ 0 attendu)")
    return float(t)


def _check_index(name: str, value: int) -> int:
    if int(value) != value or value < 0:
        raise ValidationError(f"Indice {name} invalide : {value}")
    return int(value)


@dataclass(frozen=True)
class KernelQuery:
    """Requête K_t(m, n) pour des paramètres (α, β) donnés."""

    params: JacobiParams
    t: float
    m: int
    n: int

    def __post_init__(self):
        object.__setattr__(self, "t", _check_time(self.t))
        object.__setattr__(self, "m", _check_index("m", self.m))
        object.__setattr__(self, "n", _check_index("n", self.n))


@dataclass(frozen=True)
class FrakISpec:
    """
    Paramètres de 𝔍_t^{(a,b,A,B,α,β)}(n, m) =
    ∫ e^{−t(1−x)} P_n^{(a,b)} P_m^{(A,B)} (1−x)^α (1+x)^β dx.
    """

    a: float
    b: float
    A: float
    B: float
    alpha: float
    beta: float
    n: int
    m: int
    t: float

    def __post_init__(self):
        for name in ("a", "b", "A", "B", "alpha", "beta"):
            value = getattr(self, name)
            if not np.isfinite(value) or value <= -1.0:
                raise ValidationError(f"Paramètre {name} invalide : {value}")
        _check_index("n", self.n)
        _check_index("m", self.m)
        _check_time(self.t)

    def replace(self, **changes) -> "FrakISpec":
        values = {
            "a": self.a, "b": self.b, "A": self.A, "B": self.B,
            "alpha": self.alpha, "beta": self.beta,
            "n": self.n, "m": self.m, "t": self.t,
        }
        values.update(changes)
        return FrakISpec(**values)

    @property
    def measure(self) -> JacobiParams:
        return JacobiParams(self.alpha, self.beta)


# ---------------------------------------------------------------------------
# Intégration convergée contre e^{−t(1−x)} dμ_{α,β}
# ---------------------------------------------------------------------------

def _weighted_nodes(measure: JacobiParams, t: float, count: int, regime: str):
    """Nœuds x et poids incluant le facteur e^{−t(1−x)}."""
    if regime == "jacobi":
        rule = gauss_jacobi_rule(measure, count)
        return rule.nodes, rule.weights * np.exp(-t * (1.0 - rule.nodes))

    # y = t(1 − x) : poids y^α e^{−y}, nœuds au-delà de y = 2t écartés
    rule = gauss_laguerre_rule(measure.alpha, count)
    keep = rule.nodes < 2.0 * t
    y = rule.nodes[keep]
    ratio = y / t
    scale = math.exp(-(measure.alpha + 1.0) * math.log(t))
    weights = scale * rule.weights[keep] * (2.0 - ratio) ** measure.beta
    return 1.0 - ratio, weights


def _laguerre_suitable(t: float, degree: int) -> bool:
    """
    La règle en y intègre le prolongement polynomial au-delà de y = 2t,
    de l'ordre de e^{−2t + 2·degré²/t} : négligeable seulement si cet
    exposant reste sous −LAGUERRE_TAIL_EXPONENT.
    """
    if t <= ENDPOINT_REGIME_TIME:
        return False
    return 2.0 * t - 2.0 * degree * degree / t > LAGUERRE_TAIL_EXPONENT


def _initial_count(measure: JacobiParams, t: float, degree: int, regime: str) -> int:
    if regime == "jacobi":
        return bucketed(node_count_heuristic(measure, t, degree))
    return bucketed(math.ceil(degree / 2) + HEURISTIC_MARGIN)


def _double_and_compare(
    count: int,
    nodes_for: Callable[[int], tuple],
    compute: Callable[[np.ndarray, np.ndarray], np.ndarray],
    tol: float,
    relative: bool,
) -> Tuple[Optional[np.ndarray], float]:
    """
    Double le nombre de nœuds jusqu'à ce que deux règles successives
    diffèrent de moins de tol ; (None, dernier écart) sinon.
    """
    change = float("inf")
    if count > MAX_RULE_NODES:
        return None, change
    previous = np.asarray(compute(*nodes_for(count)))
    for _ in range(MAX_DOUBLINGS):
        count *= 2
        if count > MAX_RULE_NODES:
            break
        current = np.asarray(compute(*nodes_for(count)))
        change = float(np.max(np.abs(current - previous))) if current.size else 0.0
        scale = max(1.0, float(np.max(np.abs(current)))) if relative else 1.0
        if change <= tol * scale:
            return current, change
        previous = current
    return None, change


def converged_integral(
    measure: JacobiParams,
    t: float,
    degree: int,
    compute: Callable[[np.ndarray, np.ndarray], np.ndarray],
    tol: float,
    relative: bool = False,
) -> np.ndarray:
    """
    Évalue compute(x, poids) avec la politique « doubler et comparer ».

    Args:
        measure: Mesure dμ_{α,β}
        t: Temps ≥ 0 du facteur e^{−t(1−x)}
        degree: Degré polynomial total de l'intégrande hors exponentielle
        compute: Fonction (nœuds, poids) -> tableau des intégrales
        tol: Écart maximal toléré entre deux règles successives
        relative: Si vrai, la tolérance est relative à max(1, |valeur|)

    Raises:
        ConvergenceError: Si le doublement des nœuds ne converge pas
    """
    regimes = ["laguerre", "jacobi"] if _laguerre_suitable(t, degree) else ["jacobi"]
    change = float("inf")
    for regime in regimes:
        result, change = _double_and_compare(
            _initial_count(measure, t, degree, regime),
            lambda count: _weighted_nodes(measure, t, count, regime),
            compute,
            tol,
            relative,
        )
        if result is not None:
            return result
    raise ConvergenceError(
        f"Quadrature non convergée (t={t}, degré={degree}, dernier écart={change:.3e})"
    )


# ---------------------------------------------------------------------------
# Noyau de la chaleur
# ---------------------------------------------------------------------------

def _symmetrize(block: np.ndarray) -> np.ndarray:
    s = min(block.shape)
    square = block[:s, :s]
    block[:s, :s] = np.triu(square) + np.triu(square, 1).T
    return block


@lru_cache(maxsize=256)
def heat_kernel_block(
    params: JacobiParams,
    t: float,
    rows: int,
    cols: int,
    tol: float = DEFAULT_KERNEL_TOL,
) -> np.ndarray:
    """
    Bloc K_t(m, n) pour 0 ≤ m ≤ rows et 0 ≤ n ≤ cols (lecture seule).

    Une seule quadrature sert tout le bloc ; la partie carrée est exactement
    symétrique.

    Raises:
        ValidationError: Si t < 0 ou si un indice est négatif
        ConvergenceError: Si la quadrature ne converge pas
    """
    t = _check_time(t)
    rows = _check_index("rows", rows)
    cols = _check_index("cols", cols)
    degree = max(rows, cols)

    def compute(x: np.ndarray, weights: np.ndarray) -> np.ndarray:
        scaled = orthonormal_table(params, degree, x) * np.sqrt(weights)
        return scaled[: rows + 1] @ scaled[: cols + 1].T

    block = _symmetrize(converged_integral(params, t, rows + cols, compute, tol).copy())
    block.setflags(write=False)
    return block


def heat_kernel(query: KernelQuery, tol: float = DEFAULT_KERNEL_TOL) -> float:
    """
    Retourne K_t(m, n), symétrique bit à bit en (m, n).

    Raises:
        ConvergenceError: Si la quadrature ne converge pas
    """
    lo, hi = sorted((query.m, query.n))
    return float(heat_kernel_block(query.params, query.t, lo, hi, tol)[lo, hi])


def kernel_value(params: JacobiParams, t: float, m: int, n: int,
                 tol: float = DEFAULT_KERNEL_TOL) -> float:
    """Raccourci pour heat_kernel(KernelQuery(params, t, m, n))."""
    return heat_kernel(KernelQuery(params, t, m, n), tol)


def tabulate_kernel_grid(
    params: JacobiParams,
    times: Sequence[float],
    mmax: int,
    tol: float = DEFAULT_KERNEL_TOL,
    threads: int = 1,
) -> List[np.ndarray]:
    """
    Grilles K_t(m, n), 0 ≤ m, n ≤ mmax, pour chaque temps (ordre conservé).
    """
    def job(t: float) -> np.ndarray:
        return heat_kernel_block(params, float(t), mmax, mmax, tol)

    if threads <= 1:
        return [job(t) for t in times]
    with ThreadPoolExecutor(max_workers=threads) as executor:
        return list(executor.map(job, times))


def kernel_grid_frame(times: Sequence[float], grids: Sequence[np.ndarray]) -> pd.DataFrame:
    """Format long (t, m, n, value) pour l'export CSV."""
    frames = []
    for t, grid in zip(times, grids):
        m, n = np.indices(grid.shape)
        frames.append(pd.DataFrame({
            "t": float(t),
            "m": m.ravel(),
            "n": n.ravel(),
            "value": grid.ravel(),
        }))
    return pd.concat(frames, ignore_index=True)


# ---------------------------------------------------------------------------
# Noyau de Poisson
# ---------------------------------------------------------------------------

def _poisson_nodes(params: JacobiParams, t: float, count: int):
    """
    Nœuds x et poids incluant e^{−t√(1−x)}, via y = √(1−x) = (1+z)/√2 :
    dμ_{α,β}(x) = 2^{−α−β/2} (√2 + y)^β dμ_{β,2α+1}(z), intégrande lisse en z.
    """
    rule = gauss_jacobi_rule(JacobiParams(params.beta, 2.0 * params.alpha + 1.0), count)
    y = (1.0 + rule.nodes) / math.sqrt(2.0)
    x = np.clip(1.0 - y * y, -1.0, 1.0)
    scale = 2.0 ** (-params.alpha - 0.5 * params.beta)
    weights = scale * rule.weights * (math.sqrt(2.0) + y) ** params.beta * np.exp(-t * y)
    return x, weights


@lru_cache(maxsize=256)
def poisson_kernel_block(
    params: JacobiParams,
    t: float,
    rows: int,
    cols: int,
    tol: float = DEFAULT_KERNEL_TOL,
) -> np.ndarray:
    """
    Bloc du noyau de Poisson ∫ e^{−t√(1−x)} p_m(x) p_n(x) dμ_{α,β}(x),
    0 ≤ m ≤ rows, 0 ≤ n ≤ cols (lecture seule).

    Le facteur √(1−x) n'est pas polynomial en x ; après le changement de
    variable y = √(1−x), l'intégrande est entier et la règle de Gauss–Jacobi
    converge rapidement pour tout t.

    Raises:
        ValidationError: Si t < 0 ou si un indice est négatif
        ConvergenceError: Si la quadrature ne converge pas
    """
    t = _check_time(t)
    rows = _check_index("rows", rows)
    cols = _check_index("cols", cols)
    degree = max(rows, cols)

    def compute(x: np.ndarray, weights: np.ndarray) -> np.ndarray:
        scaled = orthonormal_table(params, degree, x) * np.sqrt(weights)
        return scaled[: rows + 1] @ scaled[: cols + 1].T

    # Les nœuds se resserrent en 1/n² près de y = 0 : ~√t nœuds pour e^{−ty}
    count = bucketed(rows + cols + math.ceil(4.0 * math.sqrt(t)) + HEURISTIC_MARGIN)
    result, change = _double_and_compare(
        count, lambda c: _poisson_nodes(params, t, c), compute, tol, False
    )
    if result is None:
        raise ConvergenceError(
            f"Noyau de Poisson non convergé (t={t}, dernier écart={change:.3e})"
        )
    block = _symmetrize(result.copy())
    block.setflags(write=False)
    return block


def cheb_heat_closed_form(t: float, m: int, n: int) -> float:
    """
    K_t(m, n) pour α = β = −1/2 : κ e^{−t} (I_{|n−m|}(t) + I_{n+m}(t)).

    Avec p_0 = 1/√π et p_k = √(2/π) cos(kθ), κ = ε_m ε_n où ε_0 = 1/√2 et
    ε_k = 1 pour k ≥ 1 ; κ vaut donc 1, 1/√2 ou 1/2.
    """
    t = _check_time(t)
    m = _check_index("m", m)
    n = _check_index("n", n)
    kappa = (math.sqrt(0.5) if m == 0 else 1.0) * (math.sqrt(0.5) if n == 0 else 1.0)
    return kappa * (
        modified_bessel_i_scaled(abs(n - m), t) + modified_bessel_i_scaled(n + m, t)
    )


# ---------------------------------------------------------------------------
# Intégrales 𝔍_t
# ---------------------------------------------------------------------------

def frak_i_direct(spec: FrakISpec, tol: float = DEFAULT_FRAK_TOL) -> float:
    """
    𝔍_t par quadrature sous (1−x)^α (1+x)^β, avec P = p / w évalués par deux
    tables de coefficients indépendantes.

    Raises:
        ConvergenceError: Si la quadrature ne converge pas
    """
    first = JacobiParams(spec.a, spec.b)
    second = JacobiParams(spec.A, spec.B)

    def compute(x: np.ndarray, weights: np.ndarray) -> float:
        product = eval_jacobi_p(first, spec.n, x) * eval_jacobi_p(second, spec.m, x)
        return float(np.dot(weights, product))

    value = converged_integral(
        spec.measure, spec.t, spec.n + spec.m, compute, tol, relative=True
    )
    return float(value)


def _derivative_terms(spec: FrakISpec, shift_first: bool, tol: float) -> float:
    """
    t 𝔍(…, α+1, β+1) − (α − c) 𝔍(…, α, β+1) + (β − d) 𝔍(…, α+1, β), où le
    polynôme dérivé voit ses paramètres (c, d) augmentés de 1 et son degré
    diminué de 1.
    """
    if shift_first:
        base = spec.replace(a=spec.a + 1.0, b=spec.b + 1.0, n=spec.n - 1)
        c, d = spec.a, spec.b
    else:
        base = spec.replace(A=spec.A + 1.0, B=spec.B + 1.0, m=spec.m - 1)
        c, d = spec.A, spec.B
    alpha, beta = spec.alpha, spec.beta
    total = spec.t * frak_i_direct(base.replace(alpha=alpha + 1.0, beta=beta + 1.0), tol)
    if alpha != c:
        total -= (alpha - c) * frak_i_direct(base.replace(beta=beta + 1.0), tol)
    if beta != d:
        total += (beta - d) * frak_i_direct(base.replace(alpha=alpha + 1.0), tol)
    return total


def frak_i_recursive(spec: FrakISpec, tol: float = DEFAULT_FRAK_TOL) -> float:
    """
    Une application de la récurrence sur 𝔍_t, chaque terme du membre de droite
    étant évalué par `frak_i_direct`.

    - n = 0, m ≥ 1 : 𝔍 = [t 𝔍_1 − (α−A) 𝔍_2 + (β−B) 𝔍_3] / (2m), degré m − 1 ;
    - m = 0, n ≥ 1 : formule symétrique en (a, b, n) ;
    - n, m ≥ 1 : avec N = n+a+b+1 et M = m+A+B+1,
      2(nN − mM) 𝔍 = N·[termes en P_{n−1}^{(a+1,b+1)}] − M·[termes en P_{m−1}^{(A+1,B+1)}].

    Raises:
        ValidationError: Si la récurrence est dégénérée (n = m = 0, N = 0, M = 0
            ou nN = mM) ; utiliser alors frak_i_direct
    """
    n, m = spec.n, spec.m
    if n == 0 and m == 0:
        raise ValidationError("Récurrence dégénérée pour n = m = 0")
    if n == 0:
        return _derivative_terms(spec, shift_first=False, tol=tol) / (2.0 * m)
    if m == 0:
        return _derivative_terms(spec, shift_first=True, tol=tol) / (2.0 * n)

    big_n = n + spec.a + spec.b + 1.0
    big_m = m + spec.A + spec.B + 1.0
    denominator = n * big_n - m * big_m
    if big_n == 0.0 or big_m == 0.0 or abs(denominator) < 1e-14:
        raise ValidationError(
            f"Récurrence dégénérée : n(n+a+b+1) = {n * big_n}, m(m+A+B+1) = {m * big_m}"
        )
    first = _derivative_terms(spec, shift_first=True, tol=tol)
    second = _derivative_terms(spec, shift_first=False, tol=tol)
    return (big_n * first - big_m * second) / (2.0 * denominator)


def frak_i_case(spec: FrakISpec) -> str:
    """Nom du cas de récurrence applicable ('a', 'b' ou 'c')."""
    if spec.n == 0:
        return "b"
    if spec.m == 0:
        return "c"
    return "a"


# ---------------------------------------------------------------------------
# Linéarisation, h_t, translation et convolution
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LinearizationRow:
    """
    Coefficients c(k, m, n) de p_m p_n = Σ_{k=|m−n|}^{m+n} c(k, m, n) p_k.
    """

    params: JacobiParams
    m: int
    n: int
    coefficients: np.ndarray = field(repr=False)

    @property
    def k_min(self) -> int:
        return abs(self.m - self.n)

    @property
    def k_values(self) -> np.ndarray:
        return np.arange(self.k_min, self.m + self.n + 1)

    def coefficient(self, k: int) -> float:
        if self.k_min <= k <= self.m + self.n:
            return float(self.coefficients[k - self.k_min])
        return 0.0

    def reconstruct(self, x) -> np.ndarray:
        """Σ c(k) p_k(x) sur un tableau de points."""
        table = orthonormal_table(self.params, self.m + self.n, x)
        return self.coefficients @ table[self.k_min:]

    def min_coefficient(self) -> float:
        return float(np.min(self.coefficients))

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({"k": self.k_values, "coefficient": self.coefficients})


def triple_product_integrals(params: JacobiParams, m: int, n: int, kmax: int) -> np.ndarray:
    """
    ∫ p_m p_n p_k dμ pour 0 ≤ k ≤ kmax, par une règle exacte au degré m+n+kmax.
    """
    m = _check_index("m", m)
    n = _check_index("n", n)
    kmax = _check_index("kmax", kmax)
    degree = max(m, n, kmax)
    rule = gauss_jacobi_rule(params, bucketed((m + n + kmax) // 2 + 1))
    table = orthonormal_table(params, degree, rule.nodes)
    return table[: kmax + 1] @ (rule.weights * table[m] * table[n])


@lru_cache(maxsize=4096)
def _linearization_cached(params: JacobiParams, lo: int, hi: int) -> LinearizationRow:
    values = triple_product_integrals(params, lo, hi, lo + hi)[hi - lo:]
    values.setflags(write=False)
    return LinearizationRow(params, lo, hi, values)


def linearization_coefficients(params: JacobiParams, m: int, n: int) -> LinearizationRow:
    """
    Ligne de linéarisation de p_m p_n, calculée par quadrature exacte.

    Returns:
        LinearizationRow de longueur 2·min(m, n) + 1
    """
    m = _check_index("m", m)
    n = _check_index("n", n)
    lo, hi = sorted((m, n))
    row = _linearization_cached(params, lo, hi)
    return LinearizationRow(params, m, n, row.coefficients)


def h_t_coefficient(params: JacobiParams, t: float, k: int,
                    tol: float = DEFAULT_KERNEL_TOL) -> float:
    """h_t(k) = ∫ e^{−(1−x)t} p_k dμ par quadrature directe."""
    t = _check_time(t)
    k = _check_index("k", k)

    def compute(x: np.ndarray, weights: np.ndarray) -> float:
        return float(np.dot(weights, orthonormal_table(params, k, x)[k]))

    return float(converged_integral(params, t, k, compute, tol))


def h_t_rodrigues(params: JacobiParams, t: float, k: int,
                  tol: float = DEFAULT_KERNEL_TOL) -> float:
    """
    h_t(k) = w_k t^k / (2^k k!) ∫ e^{−(1−x)t} (1−x)^{α+k} (1+x)^{β+k} dx.

    Toujours ≥ 0 ; calculé en espace logarithmique.
    """
    t = _check_time(t)
    k = _check_index("k", k)
    if t == 0.0:
        # w_0 × masse totale = √masse
        return math.exp(0.5 * log_total_mass(params.alpha, params.beta)) if k == 0 else 0.0

    shifted = params.shifted(k, k)
    average = float(converged_integral(
        shifted, t, 0, lambda x, weights: float(np.sum(weights)), tol, relative=True
    )) * math.exp(-log_total_mass(shifted.alpha, shifted.beta))
    if average <= 0.0:
        return 0.0
    log_value = (
        math.log(normalization_constant(params, k))
        + k * math.log(t / 2.0)
        - math.lgamma(k + 1.0)
        + log_total_mass(shifted.alpha, shifted.beta)
        + math.log(average)
    )
    return math.exp(log_value)


def _log_h_t_majorant(params: JacobiParams, t: float, k: int) -> float:
    if t == 0.0:
        return 0.0 if k == 0 else -math.inf
    return (
        math.log(normalization_constant(params, k))
        + k * math.log(t / 2.0)
        - math.lgamma(k + 1.0)
        + log_total_mass(params.alpha + k, params.beta + k)
    )


def h_t_truncation_index(params: JacobiParams, t: float,
                         threshold: float = H_T_THRESHOLD) -> int:
    """
    Plus petit k tel que w_k t^k / (2^k k!) · masse(α+k, β+k) < threshold.

    Raises:
        ConvergenceError: Si aucun k ≤ MAX_H_T_INDEX ne convient
    """
    t = _check_time(t)
    log_threshold = math.log(threshold)
    for k in range(MAX_H_T_INDEX + 1):
        if _log_h_t_majorant(params, t, k) < log_threshold:
            return k
    raise ConvergenceError(f"Troncature de h_t introuvable pour t={t}")


def h_t_sequence(params: JacobiParams, t: float, length: Optional[int] = None,
                 tol: float = DEFAULT_KERNEL_TOL) -> FiniteSequence:
    """h_t(0), ..., h_t(K−1) par la formule de Rodrigues, K = troncature par défaut."""
    if length is None:
        length = max(1, h_t_truncation_index(params, t))
    return FiniteSequence(np.array([h_t_rodrigues(params, t, k, tol) for k in range(length)]))


def translation(params: JacobiParams, n: int, g: FiniteSequence) -> FiniteSequence:
    """
    τ_n g(m) = Σ_{k=|m−n|}^{m+n} c(k, m, n) g(k), pour 0 ≤ m ≤ n + support(g).
    """
    n = _check_index("n", n)
    values = np.zeros(n + g.support + 1)
    for m in range(values.size):
        values[m] = _translated_value(params, m, n, g)
    return FiniteSequence(values)


def _translated_value(params: JacobiParams, m: int, n: int, g: FiniteSequence) -> float:
    row = linearization_coefficients(params, m, n)
    k_min = row.k_min
    if k_min > g.support:
        return 0.0
    k_max = min(m + n, g.support)
    return float(np.dot(row.coefficients[: k_max - k_min + 1], g.values[k_min: k_max + 1]))


def convolution(params: JacobiParams, f: FiniteSequence, g: FiniteSequence) -> FiniteSequence:
    """(f ∗ g)(n) = Σ_m f(m) τ_n g(m), pour 0 ≤ n ≤ support(f) + support(g)."""
    length = f.support + g.support + 1
    values = np.zeros(length)
    active = np.flatnonzero(f.values)
    for n in range(length):
        total = 0.0
        for m in active:
            if abs(int(m) - n) <= g.support:
                total += f.values[m] * _translated_value(params, int(m), n, g)
        values[n] = total
    return FiniteSequence(values)


def kernel_difference_decomposition(
    params: JacobiParams, t: float, n: int, m: int, tol: float = DEFAULT_KERNEL_TOL
) -> Dict[str, float]:
    """
    Décomposition de K_t(n, m) − K_t(n+1, m) issue de
    (2n+α+β+2)/2 · (1−x) P_n^{(α+1,β)} = (n+α+1) P_n − (n+1) P_{n+1} :

        (1 − r) K_t(n, m) − α/(n+1) · r · K_t(n, m)
        + (2n+α+β+2)/(2(n+1)) · (w_{n+1} / w_n^{(α+1,β)}) · D_t(n, m),

    avec r = w_{n+1}/w_n et D_t(n, m) = w_n^{(α+1,β)} w_m 𝔍_t^{(α+1,β,α,β,α+1,β)}(n, m).

    Returns:
        Dictionnaire des trois termes, de leur somme, de la différence directe
        et du résidu
    """
    alpha, beta = params.alpha, params.beta
    shifted = params.shifted(1.0, 0.0)
    w_n = normalization_constant(params, n)
    w_next = normalization_constant(params, n + 1)
    w_shifted = normalization_constant(shifted, n)
    ratio = w_next / w_n

    k_nm = kernel_value(params, t, n, m, tol)
    k_next = kernel_value(params, t, n + 1, m, tol)
    frak = frak_i_direct(
        FrakISpec(alpha + 1.0, beta, alpha, beta, alpha + 1.0, beta, n, m, t), tol
    )
    d_value = w_shifted * normalization_constant(params, m) * frak

    terms = {
        "ratio_term": (1.0 - ratio) * k_nm,
        "alpha_term": -alpha / (n + 1.0) * ratio * k_nm,
        "shifted_term": (2.0 * n + alpha + beta + 2.0) / (2.0 * (n + 1.0))
        * (w_next / w_shifted) * d_value,
    }
    total = sum(terms.values())
    direct = k_nm - k_next
    terms.update({"sum": total, "direct": direct, "residual": abs(total - direct)})
    return terms
