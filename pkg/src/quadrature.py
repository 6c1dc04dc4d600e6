"""
Quadratures de Gauss pour dμ_{α,β} et solveur tridiagonal symétrique.

- `tridiagonal_eigen` : QL implicite à décalage de Wilkinson, avec suivi de la
  première ligne des vecteurs propres (Golub–Welsch) ou des vecteurs complets ;
- `sturm_bisection_eigenvalues` : bissection sur la suite de Sturm (oracle
  indépendant pour les tests) ;
- `gauss_jacobi_rule` : nœuds et poids de Gauss–Jacobi, mis en cache ;
- `gauss_laguerre_rule` : règles de Gauss–Laguerre généralisées, même solveur.
"""

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, NamedTuple, Optional

import numpy as np
import pandas as pd
from scipy.special import gammaln

from .errors import ConvergenceError, ValidationError
from .jacobi_core import JacobiParams, coefficient_table, total_mass

MAX_QL_SWEEPS = 50
NODE_BUCKET = 16
HEURISTIC_MARGIN = 40

_EPS = np.finfo(float).eps


class EigenDecomposition(NamedTuple):
    """Valeurs propres croissantes, première ligne des vecteurs propres, vecteurs."""

    values: np.ndarray
    first_row: np.ndarray
    vectors: Optional[np.ndarray]


def tridiagonal_eigen(
    diagonal: np.ndarray, offdiagonal: np.ndarray, vectors: bool = False
) -> EigenDecomposition:
    """
    Décomposition spectrale d'une matrice tridiagonale symétrique (QL implicite).

    Args:
        diagonal: Diagonale, longueur N
        offdiagonal: Sous-diagonale, longueur N − 1
        vectors: Si vrai, calcule aussi la matrice complète des vecteurs propres
            (colonne k associée à la valeur propre k)

    Returns:
        EigenDecomposition triée par valeurs propres croissantes

    Raises:
        ValidationError: Si les longueurs sont incohérentes
        ConvergenceError: Si une valeur propre dépasse MAX_QL_SWEEPS balayages
    """
    d = [float(v) for v in np.asarray(diagonal, dtype=float).ravel()]
    n = len(d)
    off = np.asarray(offdiagonal, dtype=float).ravel()
    if n == 0 or off.size != n - 1:
        raise ValidationError(
            f"Dimensions incohérentes : diagonale {n}, sous-diagonale {off.size}"
        )
    if not (np.all(np.isfinite(d)) and np.all(np.isfinite(off))):
        raise ValidationError("Matrice tridiagonale non finie")

    e = [float(v) for v in off] + [0.0]
    q = [0.0] * n
    q[0] = 1.0
    z = np.eye(n) if vectors else None

    for l in range(n):
        sweeps = 0
        while True:
            m = l
            while m < n - 1:
                if abs(e[m]) <= _EPS * (abs(d[m]) + abs(d[m + 1])):
                    break
                m += 1
            if m == l:
                break
            if sweeps == MAX_QL_SWEEPS:
                raise ConvergenceError(
                    f"QL : pas de convergence pour la valeur propre {l} "
                    f"après {MAX_QL_SWEEPS} balayages"
                )
            sweeps += 1

            g = (d[l + 1] - d[l]) / (2.0 * e[l])
            r = math.hypot(g, 1.0)
            g = d[m] - d[l] + e[l] / (g + math.copysign(r, g))
            s = c = 1.0
            p = 0.0
            deflated = False
            i = m - 1
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

                qi1 = q[i + 1]
                q[i + 1] = s * q[i] + c * qi1
                q[i] = c * q[i] - s * qi1
                if z is not None:
                    zi1 = z[i + 1].copy()
                    z[i + 1] = s * z[i] + c * zi1
                    z[i] = c * z[i] - s * zi1
                i -= 1
            if deflated:
                continue
            d[l] -= p
            e[l] = g
            e[m] = 0.0

    order = np.argsort(d, kind="stable")
    values = np.asarray(d)[order]
    first_row = np.asarray(q)[order]
    # z contient les vecteurs propres en lignes
    full = z[order].T.copy() if z is not None else None
    return EigenDecomposition(values, first_row, full)


def sturm_count(diagonal: np.ndarray, offdiagonal: np.ndarray, x: float) -> int:
    """Nombre de valeurs propres strictement inférieures à x (suite de Sturm)."""
    count = 0
    q = 1.0
    for i, di in enumerate(diagonal):
        coupling = offdiagonal[i - 1] ** 2 if i > 0 else 0.0
        q = di - x - (coupling / q if i > 0 else 0.0)
        if q == 0.0:
            q = -_EPS * (abs(di) + abs(x) + 1.0)
        if q < 0.0:
            count += 1
    return count


def sturm_bisection_eigenvalues(
    diagonal: np.ndarray, offdiagonal: np.ndarray, tol: float = 1e-14
) -> np.ndarray:
    """
    Valeurs propres croissantes par bissection sur la suite de Sturm.

    Oracle indépendant du solveur QL.
    """
    diagonal = np.asarray(diagonal, dtype=float)
    offdiagonal = np.asarray(offdiagonal, dtype=float)
    n = diagonal.size
    radius = np.zeros(n)
    radius[:-1] += np.abs(offdiagonal)
    radius[1:] += np.abs(offdiagonal)
    lower = float(np.min(diagonal - radius)) - 1.0
    upper = float(np.max(diagonal + radius)) + 1.0

    eigenvalues = np.empty(n)
    for k in range(n):
        lo, hi = lower, upper
        while hi - lo > tol * max(1.0, abs(lo), abs(hi)):
            mid = 0.5 * (lo + hi)
            if sturm_count(diagonal, offdiagonal, mid) > k:
                hi = mid
            else:
                lo = mid
        eigenvalues[k] = 0.5 * (lo + hi)
    return eigenvalues


# ---------------------------------------------------------------------------
# Règles de Gauss–Jacobi
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class QuadratureRule:
    """
    Règle de Gauss pour dμ_{α,β} sur [-1, 1].

    Attributes:
        params: Paramètres de la mesure
        nodes: Nœuds strictement croissants dans (-1, 1)
        weights: Poids strictement positifs
        exactness: Degré polynomial intégré exactement (2·nœuds − 1)
    """

    params: JacobiParams
    nodes: np.ndarray = field(repr=False)
    weights: np.ndarray = field(repr=False)
    exactness: int = 0

    @property
    def node_count(self) -> int:
        return self.nodes.size

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({"node": self.nodes, "weight": self.weights})


@lru_cache(maxsize=128)
def gauss_jacobi_rule(params: JacobiParams, node_count: int) -> QuadratureRule:
    """
    Règle de Gauss–Jacobi à `node_count` nœuds (Golub–Welsch).

    Les nœuds sont les valeurs propres de la matrice de Jacobi tronquée ;
    poids_k = masse totale × (première composante du k-ième vecteur propre)².

    Raises:
        ValidationError: Si node_count < 1
        ConvergenceError: Si le solveur QL échoue
    """
    if int(node_count) != node_count or node_count < 1:
        raise ValidationError(f"Nombre de nœuds invalide : {node_count}")
    node_count = int(node_count)
    table = coefficient_table(params, node_count)
    decomposition = tridiagonal_eigen(table.b[:node_count], table.a[: node_count - 1])
    nodes = decomposition.values.copy()
    weights = total_mass(params) * decomposition.first_row**2
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return QuadratureRule(params, nodes, weights, 2 * node_count - 1)


def integrate(rule: QuadratureRule, integrand: Callable) -> float:
    """
    Σ poids × intégrande(nœuds), exact pour les polynômes de degré ≤ exactness.

    L'intégrande est appelé sur le tableau des nœuds ; à défaut d'un résultat
    vectorisé, il est évalué nœud par nœud.

    Raises:
        ConvergenceError: Si l'intégrande n'est pas fini en un nœud
    """
    values = np.asarray(integrand(rule.nodes), dtype=float)
    if values.shape != rule.nodes.shape:
        values = np.array([float(integrand(x)) for x in rule.nodes])
    if not np.all(np.isfinite(values)):
        raise ConvergenceError("Intégrande non fini en un nœud de quadrature")
    return float(np.dot(rule.weights, values))


def node_count_heuristic(params: JacobiParams, t: float, max_degree: int) -> int:
    """
    Nombre de nœuds initial pour e^{−t(1−x)} × polynôme de degré max_degree.

    L'appelant confirme la convergence en doublant une fois le nombre de nœuds.
    """
    if t < 0 or not np.isfinite(t):
        raise ValidationError(f"Temps invalide : {t}")
    return math.ceil(max_degree / 2) + math.ceil(t) + HEURISTIC_MARGIN


def bucketed(node_count: int) -> int:
    """Arrondit au multiple de NODE_BUCKET supérieur (partage du cache)."""
    return NODE_BUCKET * math.ceil(node_count / NODE_BUCKET)


def moment_sequence(params: JacobiParams, kmax: int) -> np.ndarray:
    """
    Moments ∫ x^k dμ_{α,β}, 0 ≤ k ≤ kmax.

    Récurrence (k + α + β + 2) m_{k+1} = (β − α) m_k + k m_{k−1},
    obtenue par intégration par parties.
    """
    alpha, beta = params.alpha, params.beta
    moments = np.zeros(kmax + 1)
    moments[0] = total_mass(params)
    for k in range(kmax):
        previous = moments[k - 1] if k > 0 else 0.0
        moments[k + 1] = (k * previous + (beta - alpha) * moments[k]) / (
            k + alpha + beta + 2.0
        )
    return moments


# ---------------------------------------------------------------------------
# Règles de Gauss–Laguerre généralisées
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LaguerreRule:
    """Règle de Gauss pour le poids y^exponent e^{−y} sur (0, ∞)."""

    exponent: float
    nodes: np.ndarray = field(repr=False)
    weights: np.ndarray = field(repr=False)


@lru_cache(maxsize=64)
def gauss_laguerre_rule(exponent: float, node_count: int) -> LaguerreRule:
    """
    Règle de Gauss–Laguerre généralisée par Golub–Welsch.

    Matrice de Jacobi du poids y^a e^{−y} : diagonale 2k + a + 1,
    sous-diagonale √(k(k + a)). Les poids Γ(a+1) q_k² sont assemblés en
    échelle logarithmique ; les plus petits s'annulent par sous-dépassement
    au lieu de devenir NaN.

    Raises:
        ValidationError: Si exponent ≤ −1 ou node_count < 1
        ConvergenceError: Si le solveur QL échoue
    """
    if exponent <= -1.0 or int(node_count) != node_count or node_count < 1:
        raise ValidationError(
            f"Règle de Laguerre invalide : exposant {exponent}, {node_count} nœuds"
        )
    a = float(exponent)
    k = np.arange(int(node_count), dtype=float)
    diagonal = 2.0 * k + a + 1.0
    offdiagonal = np.sqrt(k[1:] * (k[1:] + a))
    decomposition = tridiagonal_eigen(diagonal, offdiagonal)
    nodes = decomposition.values.copy()
    with np.errstate(divide="ignore"):
        log_q2 = 2.0 * np.log(np.abs(decomposition.first_row))
    weights = np.exp(gammaln(a + 1.0) + log_q2)
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return LaguerreRule(a, nodes, weights)
