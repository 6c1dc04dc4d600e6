"""
Coefficients de récurrence et polynômes de Jacobi orthonormés.

Ce module regroupe :
- les paramètres (α, β) et leurs tables de coefficients a_n, b_n, w_n, d_n, e_n ;
- l'évaluation des polynômes orthonormés p_n par la récurrence à trois termes ;
- les opérateurs J, 𝒥 = J − I, δ et δ* agissant sur les suites à support fini ;
- les tests d'appartenance à la région de positivité de la linéarisation.
"""

import json
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Any, Dict, Iterable, Tuple, Union

import numpy as np
from scipy.special import gammaln

from .errors import ValidationError

# Tolérances par défaut (identités entre coefficients / identités via quadrature)
COEFFICIENT_TOL = 1e-12
QUADRATURE_TOL = 1e-10

ArrayLike = Union[float, np.ndarray]


@dataclass(frozen=True)
class JacobiParams:
    """
    Couple de paramètres (α, β) de la mesure (1−x)^α (1+x)^β dx.

    Args:
        alpha: Exposant en x = 1, strictement supérieur à −1
        beta: Exposant en x = −1, strictement supérieur à −1

    Raises:
        ValidationError: Si α ou β n'est pas un réel fini > −1
    """

    alpha: float
    beta: float

    def __post_init__(self):
        for name in ("alpha", "beta"):
            value = getattr(self, name)
            if not np.isfinite(value) or value <= -1.0:
                raise ValidationError(
                    f"Paramètre {name} invalide : {value} (doit être > -1)"
                )
        object.__setattr__(self, "alpha", float(self.alpha))
        object.__setattr__(self, "beta", float(self.beta))

    @property
    def standard_range(self) -> bool:
        """Vrai si α ≥ −1/2 et β ≥ −1/2 (cadre des estimations de noyau)."""
        return self.alpha >= -0.5 and self.beta >= -0.5

    def shifted(self, d_alpha: float = 0.0, d_beta: float = 0.0) -> "JacobiParams":
        """Retourne les paramètres (α + d_alpha, β + d_beta)."""
        return JacobiParams(self.alpha + d_alpha, self.beta + d_beta)

    def to_dict(self) -> Dict[str, float]:
        return {"alpha": self.alpha, "beta": self.beta}


# ---------------------------------------------------------------------------
# Formules closes des coefficients (vectorisées en n)
# ---------------------------------------------------------------------------

def _a_values(alpha: float, beta: float, n: np.ndarray) -> np.ndarray:
    n = np.asarray(n, dtype=float)
    ab = alpha + beta
    s = 2.0 * n + ab
    with np.errstate(divide="ignore", invalid="ignore"):
        general = (2.0 / (s + 2.0)) * np.sqrt(
            (n + 1.0) * (n + alpha + 1.0) * (n + beta + 1.0) * (n + ab + 1.0)
            / ((s + 1.0) * (s + 3.0))
        )
    first = (2.0 / (ab + 2.0)) * math.sqrt(
        (alpha + 1.0) * (beta + 1.0) / (ab + 3.0)
    )
    return np.where(n == 0, first, general)


def _b_values(alpha: float, beta: float, n: np.ndarray) -> np.ndarray:
    n = np.asarray(n, dtype=float)
    ab = alpha + beta
    s = 2.0 * n + ab
    with np.errstate(divide="ignore", invalid="ignore"):
        general = (beta * beta - alpha * alpha) / (s * (s + 2.0))
    first = (beta - alpha) / (ab + 2.0)
    return np.where(n == 0, first, general)


def _log_w_values(alpha: float, beta: float, n: np.ndarray) -> np.ndarray:
    n = np.asarray(n, dtype=float)
    ab = alpha + beta
    log2 = math.log(2.0)
    # La formule générale n'a de sens que pour n ≥ 1 (Γ(α+β+1) peut diverger)
    safe_n = np.where(n == 0, 1.0, n)
    general = 0.5 * (
        np.log(2.0 * safe_n + ab + 1.0)
        + gammaln(safe_n + 1.0)
        + gammaln(safe_n + ab + 1.0)
        - (ab + 1.0) * log2
        - gammaln(safe_n + alpha + 1.0)
        - gammaln(safe_n + beta + 1.0)
    )
    first = 0.5 * (
        gammaln(ab + 2.0) - (ab + 1.0) * log2 - gammaln(alpha + 1.0) - gammaln(beta + 1.0)
    )
    return np.where(n == 0, first, general)


def _d_values(alpha: float, beta: float, n: np.ndarray) -> np.ndarray:
    n = np.asarray(n, dtype=float)
    ab = alpha + beta
    s = 2.0 * n + ab
    with np.errstate(divide="ignore", invalid="ignore"):
        general = np.sqrt(
            2.0 * (n + ab + 1.0) * (n + alpha + 1.0) / ((s + 1.0) * (s + 2.0))
        )
    first = math.sqrt(2.0 * (alpha + 1.0) / (ab + 2.0))
    return np.where(n == 0, first, general)


def _e_values(alpha: float, beta: float, n: np.ndarray) -> np.ndarray:
    n = np.asarray(n, dtype=float)
    s = 2.0 * n + alpha + beta
    return np.sqrt(2.0 * (n + beta + 1.0) * (n + 1.0) / ((s + 2.0) * (s + 3.0)))


def _check_index(n: int) -> int:
    if int(n) != n or n < 0:
        raise ValidationError(f"Indice invalide : {n} (entier ≥ 0 attendu)")
    return int(n)


def recurrence_coefficients(params: JacobiParams, n: int) -> Tuple[float, float]:
    """
    Coefficients (a_n, b_n) de la récurrence à trois termes des p_n orthonormés.

    Args:
        params: Paramètres (α, β)
        n: Indice ≥ 0

    Returns:
        Tuple (a_n, b_n)
    """
    n = _check_index(n)
    idx = np.array([n])
    return (
        float(_a_values(params.alpha, params.beta, idx)[0]),
        float(_b_values(params.alpha, params.beta, idx)[0]),
    )


def normalization_constant(params: JacobiParams, n: int) -> float:
    """
    Constante w_n telle que p_n = w_n P_n soit de norme 1 dans L²(dμ).

    Calculée en arithmétique log-gamma : pas de débordement jusqu'à n = 10^5.
    """
    n = _check_index(n)
    return float(np.exp(_log_w_values(params.alpha, params.beta, np.array([n]))[0]))


def total_mass(params: JacobiParams) -> float:
    """Masse totale 2^{α+β+1} B(α+1, β+1) de dμ_{α,β}."""
    return float(np.exp(log_total_mass(params.alpha, params.beta)))


def log_total_mass(alpha: float, beta: float) -> float:
    """Logarithme de la masse totale, via gammaln."""
    return (
        (alpha + beta + 1.0) * math.log(2.0)
        + gammaln(alpha + 1.0)
        + gammaln(beta + 1.0)
        - gammaln(alpha + beta + 2.0)
    )


# ---------------------------------------------------------------------------
# Table de coefficients
# ---------------------------------------------------------------------------

def _frozen(values: Iterable[float]) -> np.ndarray:
    array = np.array(values, dtype=float)
    array.setflags(write=False)
    return array


@dataclass(frozen=True)
class CoefficientTable:
    """
    Coefficients a_n, b_n, w_n, d_n, e_n précalculés pour 0 ≤ n ≤ cutoff.

    La table est immuable ; augmenter le cutoff construit une nouvelle table.
    """

    params: JacobiParams
    cutoff: int
    a: np.ndarray = field(repr=False)
    b: np.ndarray = field(repr=False)
    w: np.ndarray = field(repr=False)
    d: np.ndarray = field(repr=False)
    e: np.ndarray = field(repr=False)

    @classmethod
    def build(cls, params: JacobiParams, cutoff: int) -> "CoefficientTable":
        cutoff = _check_index(cutoff)
        n = np.arange(cutoff + 1)
        alpha, beta = params.alpha, params.beta
        return cls(
            params=params,
            cutoff=cutoff,
            a=_frozen(_a_values(alpha, beta, n)),
            b=_frozen(_b_values(alpha, beta, n)),
            w=_frozen(np.exp(_log_w_values(alpha, beta, n))),
            d=_frozen(_d_values(alpha, beta, n)),
            e=_frozen(_e_values(alpha, beta, n)),
        )

    def to_dict(self) -> Dict[str, Any]:
        return {
            "alpha": self.params.alpha,
            "beta": self.params.beta,
            "cutoff": self.cutoff,
            "a": self.a.tolist(),
            "b": self.b.tolist(),
            "w": self.w.tolist(),
            "d": self.d.tolist(),
            "e": self.e.tolist(),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_json(cls, payload: str) -> "CoefficientTable":
        """
        Reconstruit une table depuis son JSON.

        Raises:
            ValidationError: Si un champ manque ou si les longueurs sont incohérentes
        """
        try:
            data = json.loads(payload)
            params = JacobiParams(data["alpha"], data["beta"])
            cutoff = int(data["cutoff"])
            arrays = {key: _frozen(data[key]) for key in ("a", "b", "w", "d", "e")}
        except (KeyError, TypeError, json.JSONDecodeError) as e:
            raise ValidationError(f"Table de coefficients JSON invalide : {str(e)}")

        for key, values in arrays.items():
            if len(values) != cutoff + 1:
                raise ValidationError(
                    f"Champ {key} de longueur {len(values)} (attendu {cutoff + 1})"
                )
        return cls(params=params, cutoff=cutoff, **arrays)


@lru_cache(maxsize=256)
def coefficient_table(params: JacobiParams, cutoff: int) -> CoefficientTable:
    """Table de coefficients mise en cache par (α, β, cutoff)."""
    return CoefficientTable.build(params, cutoff)


# ---------------------------------------------------------------------------
# Évaluation des polynômes orthonormés
# ---------------------------------------------------------------------------

def recurrence_table(
    a: np.ndarray, b: np.ndarray, p0: float, degree: int, x: np.ndarray
) -> np.ndarray:
    """
    Déroule p_{n+1} = ((x − b_n) p_n − a_{n−1} p_{n−1}) / a_n pour n < degree.

    Fonctionne pour toute matrice de Jacobi (a > 0) ; aucun contrôle de domaine.

    Returns:
        Tableau (degree + 1, len(x))
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    table = np.empty((degree + 1, x.size))
    table[0] = p0
    if degree >= 1:
        table[1] = (x - b[0]) * p0 / a[0]
    for n in range(1, degree):
        table[n + 1] = ((x - b[n]) * table[n] - a[n - 1] * table[n - 1]) / a[n]
    return table


def _check_domain(x: np.ndarray) -> None:
    if not np.all(np.isfinite(x)) or np.any(np.abs(x) > 1.0):
        raise ValidationError("Point d'évaluation hors de [-1, 1]")


def orthonormal_table(params: JacobiParams, degree: int, x: ArrayLike) -> np.ndarray:
    """
    Évalue p_0, ..., p_degree sur un tableau de points.

    Args:
        params: Paramètres (α, β)
        degree: Degré maximal ≥ 0
        x: Points de [-1, 1]

    Returns:
        Tableau de forme (degree + 1, len(x))

    Raises:
        ValidationError: Si un point sort de [-1, 1]
    """
    degree = _check_index(degree)
    x = np.atleast_1d(np.asarray(x, dtype=float))
    _check_domain(x)
    table = coefficient_table(params, degree + 1)
    return recurrence_table(table.a, table.b, table.w[0], degree, x)


def eval_orthonormal_batch(params: JacobiParams, degree: int, x: float) -> np.ndarray:
    """Retourne p_0(x), ..., p_degree(x) en une seule passe de récurrence."""
    return orthonormal_table(params, degree, np.array([x]))[:, 0]


def eval_orthonormal(params: JacobiParams, n: int, x: float) -> float:
    """Retourne p_n(x) = w_n P_n(x)."""
    return float(eval_orthonormal_batch(params, n, x)[-1])


def eval_jacobi_p(params: JacobiParams, n: int, x: ArrayLike) -> np.ndarray:
    """Polynôme non normalisé P_n = p_n / w_n, évalué sur un tableau de points."""
    values = orthonormal_table(params, n, x)[n]
    return values / normalization_constant(params, n)


# ---------------------------------------------------------------------------
# Suites à support fini
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FiniteSequence:
    """
    Suite réelle f(0), f(1), ... nulle au-delà de `support`.

    Les valeurs sont stockées en lecture seule ; au moins une valeur est stockée.
    """

    values: np.ndarray

    def __post_init__(self):
        values = np.array(self.values, dtype=float).ravel()
        if values.size == 0:
            values = np.zeros(1)
        if not np.all(np.isfinite(values)):
            raise ValidationError("Suite contenant des valeurs non finies")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @classmethod
    def zeros(cls, support: int = 0) -> "FiniteSequence":
        return cls(np.zeros(_check_index(support) + 1))

    @classmethod
    def delta(cls, k: int) -> "FiniteSequence":
        """Masse de Dirac δ_k."""
        values = np.zeros(_check_index(k) + 1)
        values[k] = 1.0
        return cls(values)

    @property
    def support(self) -> int:
        return self.values.size - 1

    def __len__(self) -> int:
        return self.values.size

    def __getitem__(self, n: int) -> float:
        if n < 0:
            raise IndexError(n)
        return float(self.values[n]) if n <= self.support else 0.0

    def padded(self, length: int) -> np.ndarray:
        """Copie modifiable des valeurs, complétée par des zéros ou tronquée."""
        out = np.zeros(length)
        k = min(length, self.values.size)
        out[:k] = self.values[:k]
        return out

    def trimmed(self) -> "FiniteSequence":
        """Retire les zéros finaux (garde au moins une valeur)."""
        nonzero = np.flatnonzero(self.values)
        last = int(nonzero[-1]) if nonzero.size else 0
        return FiniteSequence(self.values[: last + 1])

    def is_zero(self) -> bool:
        return not np.any(self.values)

    def norm(self, p: float = 2.0) -> float:
        return float(np.linalg.norm(self.values, ord=p))

    def inner(self, other: "FiniteSequence") -> float:
        length = max(len(self), len(other))
        return float(np.dot(self.padded(length), other.padded(length)))

    def _combine(self, other: "FiniteSequence", sign: float) -> "FiniteSequence":
        length = max(len(self), len(other))
        return FiniteSequence(self.padded(length) + sign * other.padded(length))

    def __add__(self, other: "FiniteSequence") -> "FiniteSequence":
        return self._combine(other, 1.0)

    def __sub__(self, other: "FiniteSequence") -> "FiniteSequence":
        return self._combine(other, -1.0)

    def __mul__(self, scalar: float) -> "FiniteSequence":
        return FiniteSequence(self.values * float(scalar))

    __rmul__ = __mul__

    def to_list(self):
        return self.values.tolist()


# ---------------------------------------------------------------------------
# Opérateurs J, 𝒥, δ, δ*
# ---------------------------------------------------------------------------

def apply_jacobi_operator(
    params: JacobiParams, f: FiniteSequence, shifted: bool = False
) -> FiniteSequence:
    """
    Applique J f(n) = a_{n−1} f(n−1) + b_n f(n) + a_n f(n+1), ou 𝒥 = J − I.

    Args:
        params: Paramètres (α, β)
        f: Suite à support fini S
        shifted: Si vrai, applique 𝒥 = J − I

    Returns:
        Suite de support S + 1
    """
    S = f.support
    table = coefficient_table(params, S + 1)
    fv = f.values
    g = np.zeros(S + 2)
    diagonal = table.b[: S + 1] - (1.0 if shifted else 0.0)
    g[: S + 1] += diagonal * fv
    g[1:] += table.a[: S + 1] * fv
    g[:S] += table.a[:S] * fv[1:]
    return FiniteSequence(g)


def apply_delta(params: JacobiParams, f: FiniteSequence) -> FiniteSequence:
    """δf(n) = d_n f(n) − e_n f(n+1) ; même support que f."""
    S = f.support
    table = coefficient_table(params, S + 1)
    fv = f.values
    g = table.d[: S + 1] * fv
    g[:S] -= table.e[:S] * fv[1:]
    return FiniteSequence(g)


def apply_delta_star(params: JacobiParams, g: FiniteSequence) -> FiniteSequence:
    """δ*g(n) = d_n g(n) − e_{n−1} g(n−1), avec δ*g(0) = d_0 g(0) ; support + 1."""
    S = g.support
    table = coefficient_table(params, S + 1)
    gv = g.values
    h = np.zeros(S + 2)
    h[: S + 1] = table.d[: S + 1] * gv
    h[1:] -= table.e[: S + 1] * gv
    return FiniteSequence(h)


# ---------------------------------------------------------------------------
# Région de positivité de la linéarisation
# ---------------------------------------------------------------------------

def region_v_membership(params: JacobiParams) -> bool:
    """
    Vrai si α ≥ β et
    (α+β+1)(α+β+4)²(α+β+6) ≥ (α−β)²((α+β+1)² − 7(α+β+1) − 24).
    """
    alpha, beta = params.alpha, params.beta
    if alpha < beta:
        return False
    s1 = alpha + beta + 1.0
    lhs = s1 * (alpha + beta + 4.0) ** 2 * (alpha + beta + 6.0)
    rhs = (alpha - beta) ** 2 * (s1 * s1 - 7.0 * s1 - 24.0)
    return bool(lhs >= rhs)


def gasper_simple(params: JacobiParams) -> bool:
    """Condition suffisante simplifiée : α ≥ β et α + β ≥ −1."""
    return params.alpha >= params.beta and params.alpha + params.beta >= -1.0
