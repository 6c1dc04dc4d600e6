"""
Hiérarchie d'exceptions du projet.

Chaque famille d'erreur correspond à un code de sortie de la ligne de commande.
"""

from typing import Any, Dict, Optional


class JacobiHeatError(RuntimeError):
    """Erreur racine de la bibliothèque."""

    exit_code = 1


class ValidationError(JacobiHeatError, ValueError):
    """Paramètres ou préconditions invalides (α, β ≤ −1, |x| > 1, grille vide...)."""

    exit_code = 1


class ConvergenceError(JacobiHeatError):
    """Non-convergence numérique (itérations QL, doublement des nœuds épuisé...)."""

    exit_code = 2


class InvariantViolation(JacobiHeatError):
    """
    Une suite de vérification a trouvé un contre-exemple.

    Args:
        message: Description de la violation
        witness: Données du contre-exemple (indices, valeurs, paramètres)
    """

    exit_code = 3

    def __init__(self, message: str, witness: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.witness = witness or {}
