"""
Fonctions de Bessel modifiées de première espèce I_m(t), ordre entier.

Série entière pour t ≤ 20, récurrence descendante de Miller normalisée par
e^t = I_0(t) + 2 Σ_{k≥1} I_k(t) au-delà. La forme mise à l'échelle
e^{−t} I_m(t) est définie pour tout t ≥ 0 : pour t > ASYMPTOTIC_LIMIT, le
développement de Hankel remplace la récurrence quand il converge.
"""

import math
from typing import Optional

from scipy.special import gammaln

from .errors import ValidationError

SERIES_LIMIT = 20.0
MAX_ARGUMENT = 200.0
ASYMPTOTIC_LIMIT = 1e4
_RESCALE = 1e250


def _check_arguments(order: int, t: float, limit: float = math.inf) -> int:
    if int(order) != order or order < 0:
        raise ValidationError(f"Ordre de Bessel invalide : {order}")
    if not (0.0 <= t <= limit):
        raise ValidationError(
            f"Argument de Bessel hors domaine : {t} (attendu dans [0, {limit}])"
        )
    return int(order)


def _series(order: int, t: float) -> float:
    half = 0.5 * t
    log_first = order * math.log(half) - gammaln(order + 1.0)
    if log_first < -745.0:
        return 0.0
    term = math.exp(log_first)
    total = term
    quarter = half * half
    k = 0
    while term > 1e-17 * total:
        k += 1
        term *= quarter / (k * (k + order))
        total += term
    return total


def _miller_scaled(order: int, t: float) -> float:
    """e^{−t} I_order(t) par récurrence descendante."""
    top = max(order, math.ceil(t))
    start = top + math.ceil(12.0 * math.sqrt(top)) + 30
    two_over_t = 2.0 / t

    upper, current = 0.0, 1.0
    result = 0.0
    total = 0.0
    for k in range(start, 0, -1):
        lower = k * two_over_t * current + upper
        upper, current = current, lower
        # current vaut maintenant I_{k−1} à un facteur près
        if k - 1 == order:
            result = current
        total += current if k == 1 else 2.0 * current
        if abs(current) > _RESCALE:
            upper /= _RESCALE
            current /= _RESCALE
            result /= _RESCALE
            total /= _RESCALE
    return result / total


def _asymptotic_scaled(order: int, t: float) -> Optional[float]:
    """
    e^{−t} I_order(t) ≈ (2πt)^{−1/2} Σ_k (−1)^k Π_{j≤k} (4ν² − (2j−1)²) / (k! (8t)^k).

    None si les termes cessent de décroître avant d'atteindre 1e−17.
    """
    mu = 4.0 * order * order
    term = 1.0
    total = 1.0
    for k in range(1, 200):
        previous = abs(term)
        term *= -(mu - (2 * k - 1) ** 2) / (k * 8.0 * t)
        if abs(term) >= previous:
            return None
        total += term
        if abs(term) <= 1e-17 * abs(total):
            return total / math.sqrt(2.0 * math.pi * t)
    return None


def modified_bessel_i_scaled(order: int, t: float) -> float:
    """
    Retourne e^{−t} I_order(t) pour tout t ≥ 0.

    Raises:
        ValidationError: Si l'ordre est invalide ou si t < 0 (ou non fini)
    """
    order = _check_arguments(order, t)
    if t == 0.0:
        return 1.0 if order == 0 else 0.0
    if t <= SERIES_LIMIT:
        return _series(order, t) * math.exp(-t)
    if t > ASYMPTOTIC_LIMIT:
        value = _asymptotic_scaled(order, t)
        if value is not None:
            return value
    return _miller_scaled(order, t)


def modified_bessel_i(order: int, t: float) -> float:
    """
    Retourne I_order(t), erreur relative ≤ 1e−12 sur [0, 200].

    Raises:
        ValidationError: Si l'ordre ou l'argument est hors domaine
    """
    order = _check_arguments(order, t, MAX_ARGUMENT)
    if t == 0.0:
        return 1.0 if order == 0 else 0.0
    if t <= SERIES_LIMIT:
        return _series(order, t)
    return _miller_scaled(order, t) * math.exp(t)
