"""
Suites de vérification des invariants numériques.

Chaque suite renvoie un résumé (dict) et lève InvariantViolation, avec le
contre-exemple dans `witness`, dès qu'une propriété est violée.
"""

import math
from typing import Any, Callable, Dict, List, Optional

import numpy as np
from tqdm import tqdm

from .analysis import (
    WeightSeq,
    ap_constant,
    ap_stabilization,
    estimate_bound_constant,
)
from .errors import InvariantViolation, ValidationError
from .jacobi_core import (
    COEFFICIENT_TOL,
    FiniteSequence,
    JacobiParams,
    apply_delta,
    apply_delta_star,
    apply_jacobi_operator,
    coefficient_table,
    region_v_membership,
)
from .kernel import (
    FrakISpec,
    cheb_heat_closed_form,
    frak_i_direct,
    frak_i_recursive,
    h_t_coefficient,
    h_t_rodrigues,
    heat_kernel_block,
    linearization_coefficients,
)
from .semigroup import (
    GeneralJacobiMatrix,
    TimeGrid,
    apply_heat,
    apply_poisson,
    chapman_kolmogorov_check,
    energy_rate,
    evolve_ivp,
    matrix_exponential_kernel,
    maximal_heat_sequence,
    maximal_poisson_sequence,
    semigroup_law_residual,
    strong_continuity_profile,
)

DEFAULT_SEED = 7
DEFAULT_CASES = 20
POSITIVITY_TIMES = (0.1, 1.0, 10.0, 100.0)
LINEARIZATION_SWEEP = 12
CHEBYSHEV = JacobiParams(-0.5, -0.5)


def random_sequence(rng: np.random.Generator, max_support: int) -> FiniteSequence:
    """Suite aléatoire normale de support tiré dans [0, max_support]."""
    support = int(rng.integers(0, max_support + 1))
    return FiniteSequence(rng.standard_normal(support + 1))


class InvariantSuiteRunner:
    """
    Exécute les suites de vérification pour un couple (α, β).

    Args:
        params: Paramètres (α, β)
        cases: Nombre de cas aléatoires par suite
        seed: Graine du générateur aléatoire
        threads: Parallélisme maximal des balayages
        verbose: Affiche les barres de progression et les résumés
    """

    SUITES = (
        "kronecker", "factorization", "positivity", "semigroup", "chapman",
        "oracle", "chebyshev", "lemma51", "bounds", "ap", "energy", "poisson",
    )

    def __init__(
        self,
        params: JacobiParams,
        cases: int = DEFAULT_CASES,
        seed: int = DEFAULT_SEED,
        threads: int = 1,
        verbose: bool = False,
    ):
        self.params = params
        self.cases = cases
        self.seed = seed
        self.threads = threads
        self.verbose = verbose

    # ------------------------------------------------------------------
    # Orchestration
    # ------------------------------------------------------------------

    def run(self, suite: str) -> Dict[str, Any]:
        """
        Exécute une suite nommée.

        Raises:
            ValidationError: Si la suite est inconnue
            InvariantViolation: Si un invariant est violé
        """
        if suite not in self.SUITES:
            raise ValidationError(
                f"Suite inconnue : {suite} (disponibles : {', '.join(self.SUITES)})"
            )
        rng = np.random.default_rng(self.seed)
        method: Callable[[np.random.Generator], Dict[str, Any]] = getattr(
            self, f"_suite_{suite}"
        )
        summary = method(rng)
        summary.update({"suite": suite, "passed": True,
                        "alpha": self.params.alpha, "beta": self.params.beta,
                        "seed": self.seed, "cases": self.cases})
        if self.verbose:
            print(f"✅ Suite {suite} : {summary.get('checks', 0)} vérifications")
        return summary

    def run_all(self, suites: Optional[List[str]] = None) -> List[Dict[str, Any]]:
        """Exécute plusieurs suites dans l'ordre ; s'arrête à la première violation."""
        return [self.run(suite) for suite in (suites or list(self.SUITES))]

    def _progress(self, iterable, desc: str):
        return tqdm(iterable, desc=desc, disable=not self.verbose, leave=False)

    @staticmethod
    def _fail(message: str, **witness) -> None:
        raise InvariantViolation(message, witness)

    # ------------------------------------------------------------------
    # Suites
    # ------------------------------------------------------------------

    def _suite_kronecker(self, rng) -> Dict[str, Any]:
        block = heat_kernel_block(self.params, 0.0, 30, 30)
        error = np.abs(block - np.eye(31))
        worst = float(error.max())
        if worst >= 1e-11:
            m, n = np.unravel_index(int(np.argmax(error)), error.shape)
            self._fail("K_0 n'est pas le symbole de Kronecker",
                       m=int(m), n=int(n), error=worst)
        return {"checks": int(error.size), "max_residual": worst}

    def _suite_factorization(self, rng) -> Dict[str, Any]:
        table = coefficient_table(self.params, 200)
        product = table.d[:-1] * table.e[:-1]
        a_error = float(np.max(np.abs(product - table.a[:-1]) / table.a[:-1]))
        b_expected = 1.0 - table.d**2 - np.concatenate([[0.0], table.e[:-1] ** 2])
        b_error = float(np.max(np.abs(b_expected - table.b)))
        if a_error > 1e-13 or b_error > 1e-13:
            self._fail("Identités a = d·e ou b = 1 − d² − e² violées",
                       a_error=a_error, b_error=b_error)

        worst_adjoint = 0.0
        worst_factor = 0.0
        for _ in self._progress(range(self.cases), "factorisation"):
            f = random_sequence(rng, 30)
            g = random_sequence(rng, 30)
            lhs = apply_delta(self.params, f).inner(g)
            rhs = f.inner(apply_delta_star(self.params, g))
            scale = max(1.0, f.norm() * g.norm())
            worst_adjoint = max(worst_adjoint, abs(lhs - rhs) / scale)
            factored = apply_delta_star(self.params, apply_delta(self.params, f)) * -1.0
            direct = apply_jacobi_operator(self.params, f, shifted=True)
            worst_factor = max(worst_factor, float(np.max(np.abs((factored - direct).values))))
            if direct.inner(f) > COEFFICIENT_TOL * max(1.0, f.norm() ** 2):
                self._fail("⟨𝒥f, f⟩ > 0", f=f.to_list())
        if worst_adjoint > 1e-13 or worst_factor > 1e-12:
            self._fail("Adjonction δ/δ* ou factorisation 𝒥 = −δ*δ violée",
                       adjoint=worst_adjoint, factorization=worst_factor)
        return {"checks": 2 + 3 * self.cases,
                "max_residual": max(a_error, b_error, worst_adjoint, worst_factor)}

    def _suite_positivity(self, rng) -> Dict[str, Any]:
        in_v = region_v_membership(self.params)
        checks = 0
        most_negative = (math.inf, None)
        for m in self._progress(range(LINEARIZATION_SWEEP + 1), "linéarisation"):
            for n in range(m, LINEARIZATION_SWEEP + 1):
                row = linearization_coefficients(self.params, m, n)
                checks += row.coefficients.size
                index = int(np.argmin(row.coefficients))
                if row.coefficients[index] < most_negative[0]:
                    most_negative = (float(row.coefficients[index]),
                                     (int(row.k_values[index]), m, n))

        threshold = -1e-10 if not in_v else -1e-12
        if most_negative[0] < threshold:
            k, m, n = most_negative[1]
            self._fail(
                f"Coefficient de linéarisation négatif c({k}, {m}, {n}) = "
                f"{most_negative[0]:.3e}",
                k=k, m=m, n=n, value=most_negative[0], in_region_v=in_v,
            )
        if not in_v:
            return {"checks": checks, "in_region_v": False,
                    "min_coefficient": most_negative[0]}

        min_kernel = math.inf
        worst_dual = 0.0
        for t in self._progress(POSITIVITY_TIMES, "noyau"):
            block = heat_kernel_block(self.params, t, 25, 25)
            min_kernel = min(min_kernel, float(block.min()))
            checks += block.size
            if block.min() < -1e-11:
                m, n = np.unravel_index(int(np.argmin(block)), block.shape)
                self._fail("Noyau négatif", t=t, m=int(m), n=int(n),
                           value=float(block.min()))
            for k in range(6):
                direct = h_t_coefficient(self.params, t, k)
                dual = h_t_rodrigues(self.params, t, k)
                worst_dual = max(worst_dual, abs(direct - dual) / max(abs(dual), 1e-3))
                if dual < 0 or abs(direct - dual) > 1e-8 * abs(dual) + 1e-12:
                    self._fail("h_t(k) négatif ou formules en désaccord",
                               t=t, k=k, direct=direct, rodrigues=dual)
                checks += 1
        return {"checks": checks, "in_region_v": True,
                "min_coefficient": most_negative[0], "min_kernel": min_kernel,
                "max_dual_residual": worst_dual}

    def _suite_semigroup(self, rng) -> Dict[str, Any]:
        times = (0.1, 1.0, 5.0)
        worst = 0.0
        for _ in self._progress(range(self.cases), "semi-groupe"):
            f = random_sequence(rng, 20)
            for t1 in times:
                for t2 in times:
                    residual = semigroup_law_residual(self.params, f, t1, t2, 150)
                    worst = max(worst, residual)
                    if residual >= 1e-7:
                        self._fail("Loi de semi-groupe violée", t1=t1, t2=t2,
                                   residual=residual, f=f.to_list())
            for t in times:
                if apply_heat(self.params, t, f, 150).norm() > f.norm() + 1e-12:
                    self._fail("W_t n'est pas une contraction", t=t, f=f.to_list())
        f = random_sequence(rng, 10) * 0.1
        profile = strong_continuity_profile(self.params, f, 20)
        if np.any(np.diff(profile) > 1e-14) or profile[-1] >= 1e-6:
            self._fail("Continuité forte en défaut", profile=profile.tolist())
        return {"checks": self.cases * 12 + 1, "max_residual": worst}

    def _suite_chapman(self, rng) -> Dict[str, Any]:
        worst = 0.0
        pairs = [(0.0, 0.0), (0.0, 1.0), (1.0, 2.0), (0.5, 0.5)]
        for t1, t2 in self._progress(pairs, "Chapman–Kolmogorov"):
            for _ in range(max(1, self.cases // 4)):
                n, j = (int(v) for v in rng.integers(0, 11, size=2))
                residual = chapman_kolmogorov_check(self.params, t1, t2, n, j, 120)
                worst = max(worst, residual)
                if residual >= 1e-8:
                    self._fail("Identité de Chapman–Kolmogorov violée",
                               t1=t1, t2=t2, n=n, j=j, residual=residual)
        return {"checks": len(pairs) * max(1, self.cases // 4), "max_residual": worst}

    def _suite_oracle(self, rng) -> Dict[str, Any]:
        J = GeneralJacobiMatrix.from_params(self.params, 200)
        worst = 0.0
        for t in self._progress((0.5, 2.0, 10.0), "oracle"):
            exponential = matrix_exponential_kernel(J, t, 200)[:21, :21]
            quadrature = heat_kernel_block(self.params, t, 20, 20)
            error = float(np.max(np.abs(exponential - quadrature)))
            worst = max(worst, error)
            if error >= 1e-8:
                self._fail("Noyau et exponentielle de matrice en désaccord",
                           t=t, error=error)
        return {"checks": 3 * 21 * 21, "max_residual": worst}

    def _suite_chebyshev(self, rng) -> Dict[str, Any]:
        worst = 0.0
        for t in self._progress((0.5, 1.5, 5.0, 20.0), "Chebyshev"):
            block = heat_kernel_block(CHEBYSHEV, t, 15, 15)
            for m in range(16):
                for n in range(16):
                    error = abs(cheb_heat_closed_form(t, m, n) - block[m, n])
                    worst = max(worst, error)
                    if error >= 1e-9:
                        self._fail("Forme close de Chebyshev en désaccord",
                                   t=t, m=m, n=n, error=error)
        return {"checks": 4 * 256, "max_residual": worst}

    def _random_frak_spec(self, rng, case: str) -> FrakISpec:
        while True:
            a, b, A, B, alpha, beta = rng.uniform(-0.5, 2.0, size=6)
            t = float(rng.uniform(0.0, 5.0))
            n = 0 if case == "b" else int(rng.integers(1, 7))
            m = 0 if case == "c" else int(rng.integers(1, 7))
            spec = FrakISpec(a, b, A, B, alpha, beta, n, m, t)
            if case != "a":
                return spec
            gap = n * (n + a + b + 1) - m * (m + A + B + 1)
            if abs(gap) > 1e-3:
                return spec

    def _suite_lemma51(self, rng) -> Dict[str, Any]:
        worst = 0.0
        for case in ("a", "b", "c"):
            for _ in self._progress(range(self.cases), f"récurrence cas {case}"):
                spec = self._random_frak_spec(rng, case)
                direct = frak_i_direct(spec)
                recursive = frak_i_recursive(spec)
                residual = abs(direct - recursive) / max(1.0, abs(direct))
                worst = max(worst, residual)
                if residual >= 1e-9:
                    self._fail("Récurrence de 𝔍 en désaccord", case=case,
                               spec=spec.__dict__, direct=direct, recursive=recursive)
        return {"checks": 3 * self.cases, "max_residual": worst}

    def _suite_bounds(self, rng) -> Dict[str, Any]:
        grid = TimeGrid.logarithmic(1e-2, 1e2, 30)
        constants = {}
        for kind in self._progress(("lemma31", "lemma41", "cz_a", "lemma42",
                                    "cz_b1", "cz_b2"), "estimations"):
            small = estimate_bound_constant(kind, self.params, (1, 20), grid)
            large = estimate_bound_constant(kind, self.params, (1, 40), grid.refined())
            ratio = large.estimated_constant / max(small.estimated_constant, 1e-300)
            constants[kind] = {"small": small.estimated_constant,
                               "large": large.estimated_constant, "ratio": ratio}
            if not np.isfinite(ratio) or abs(ratio - 1.0) > 0.1:
                self._fail(f"Constante {kind} instable", **constants[kind])
            telescoped = large.extras.get("telescoped_majorant")
            if telescoped is not None and large.estimated_constant > telescoped * (1 + 1e-9) + 1e-12:
                self._fail(f"Majorant télescopique dépassé pour {kind}",
                           direct=large.estimated_constant, telescoped=telescoped)
        return {"checks": 2 * len(constants), "constants": constants}

    def _suite_ap(self, rng) -> Dict[str, Any]:
        N = 1000
        for p in (1.0, 1.5, 2.0, 3.0):
            value = ap_constant(WeightSeq.unit(N), p, N)
            if value != 1.0:
                self._fail("A_p du poids unité différent de 1", p=p, value=value)
        inside = ap_stabilization(lambda size: WeightSeq.power(0.3, size), 2.0, N)
        outside = ap_stabilization(lambda size: WeightSeq.power(1.5, size), 2.0, N)
        if not inside["stable"]:
            self._fail("Le poids (n+1)^0.3 devrait être dans A_2", **inside)
        if outside["ratio"] <= 1.2:
            self._fail("Le poids (n+1)^1.5 ne devrait pas être dans A_2", **outside)
        return {"checks": 6, "inside": inside, "outside": outside}

    def _suite_energy(self, rng) -> Dict[str, Any]:
        grid = TimeGrid((0.0, 0.5, 1.0, 2.0, 5.0))
        worst = 0.0
        for _ in self._progress(range(max(1, self.cases // 4)), "énergie"):
            f = random_sequence(rng, 10)
            trace = evolve_ivp(self.params, f, grid)
            if not trace.is_non_increasing():
                self._fail("Énergie croissante", energies=trace.energies.tolist())
            bound = 2e-4 * f.norm() + 1e-7
            if trace.residuals is not None and np.any(trace.residuals > bound):
                self._fail("Résidu de l'équation trop grand",
                           residuals=trace.residuals.tolist())
            for t in (0.0, 1.0):
                rate, dissipation = energy_rate(self.params, f, t)
                error = abs(rate - dissipation) / max(abs(dissipation), 1e-12)
                worst = max(worst, error)
                if error > 1e-6:
                    self._fail("dE/dt ≠ −Σ(δu)²", t=t, rate=rate,
                               dissipation=dissipation)
        return {"checks": 3 * max(1, self.cases // 4), "max_residual": worst}

    def _suite_poisson(self, rng) -> Dict[str, Any]:
        grid = TimeGrid.logarithmic()
        checks = 0
        worst = 0.0
        for _ in self._progress(range(max(1, self.cases // 5)), "Poisson"):
            f = random_sequence(rng, 8)
            if (apply_poisson(self.params, 0.0, f, 40) - f).norm() > 1e-10:
                self._fail("P_0 f ≠ f", f=f.to_list())
            heat = maximal_heat_sequence(self.params, f, grid, 40, threads=self.threads)
            poisson = maximal_poisson_sequence(self.params, f, grid, 40,
                                               threads=self.threads, method="kernel")
            excess = poisson - heat
            checks += excess.size + 1
            if np.any(excess > 1e-9):
                n = int(np.argmax(excess))
                self._fail("P_* f(n) > W_* f(n)", n=n, heat=float(heat[n]),
                           poisson=float(poisson[n]))

            # Subordination contre noyau de Poisson direct
            by_kernel = apply_poisson(self.params, 1.0, f, 40, method="kernel")
            by_subordination = apply_poisson(self.params, 1.0, f, 40,
                                             method="subordination")
            # erreur de quadrature en u proportionnelle à ‖f‖₁
            scale = max(1.0, float(np.sum(np.abs(f.values))))
            gap = float(np.max(np.abs(by_kernel.values - by_subordination.values))) / scale
            worst = max(worst, gap)
            checks += 1
            if gap > 1e-6:
                self._fail("Subordination éloignée du noyau de Poisson", gap=gap,
                           f=f.to_list())

            # P_{1/2} P_{1/2} f = P_1 f sur les premiers indices
            half = apply_poisson(self.params, 0.5, f, 300, method="kernel")
            composed = apply_poisson(self.params, 0.5, half, 300,
                                     method="kernel").values[:21]
            direct = apply_poisson(self.params, 1.0, f, 300, method="kernel").values[:21]
            residual = float(np.max(np.abs(composed - direct)))
            checks += 1
            if residual > 1e-7:
                self._fail("Loi de semi-groupe de Poisson violée",
                           residual=residual, f=f.to_list())
        return {"checks": checks, "max_residual": worst}
