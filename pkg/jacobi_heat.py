#!/usr/bin/env python3
"""
Point d'entrée : semi-groupes de la chaleur et de Poisson pour Jacobi.

Exemples :
    python jacobi_heat.py kernel --alpha 0 --beta 0 --t 1 --mmax 10
    python jacobi_heat.py verify positivity --alpha -0.5 --beta -0.5
"""

import sys
from pathlib import Path

# Ajouter la racine du projet au PATH
current_dir = Path(__file__).parent
sys.path.insert(0, str(current_dir))

from src.main import main  # noqa: E402

if __name__ == "__main__":
    sys.exit(main())
