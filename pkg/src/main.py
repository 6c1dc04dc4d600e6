"""
Module principal : interface en ligne de commande.

Sous-commandes : kernel, apply, poisson, maximal, verify, linearize,
quadrature, bench. Codes de sortie : 0 succès, 1 validation,
2 non-convergence, 3 violation d'invariant.

Colonnes des CSV produits :
  kernel      m, 0, 1, ..., mmax (un seul temps) ou t, m, n, value
  apply       t, n, value          (idem poisson)
  maximal     n, f, heat[, poisson]
  linearize   k, coefficient
  quadrature  node, weight
"""

import argparse
import sys
import time
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, List, Optional, Sequence

import numpy as np
import pandas as pd

from .errors import InvariantViolation, JacobiHeatError, ValidationError
from .export import ExportManager
from .jacobi_core import FiniteSequence, JacobiParams
from .kernel import (
    DEFAULT_KERNEL_TOL,
    heat_kernel_block,
    kernel_grid_frame,
    linearization_coefficients,
    tabulate_kernel_grid,
)
from .quadrature import gauss_jacobi_rule
from .semigroup import (
    DEFAULT_POISSON_NODES,
    POISSON_METHODS,
    TimeGrid,
    apply_poisson,
    default_truncation,
    evolve_ivp,
    maximal_heat_sequence,
    maximal_poisson_sequence,
)
from .verification import DEFAULT_CASES, DEFAULT_SEED, InvariantSuiteRunner

COMMANDS = ("kernel", "apply", "poisson", "maximal", "verify", "linearize",
            "quadrature", "bench")


class CliArgumentParser(argparse.ArgumentParser):
    """Parseur dont les erreurs d'arguments sortent avec le code 1."""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        print(f"❌ Erreur d'arguments : {message}", file=sys.stderr)
        sys.exit(1)


@dataclass
class RunConfig:
    """
    Configuration validée d'une exécution.

    Attributes:
        command: Sous-commande
        alpha, beta: Paramètres de la mesure
        options: Options propres à la sous-commande
        tol: Tolérance du noyau
        seed: Graine des cas aléatoires
        threads: Parallélisme maximal
        output: Chemin de sortie (facultatif)
        fmt: Format de sortie (csv ou json)
        verbose: Affichage détaillé
    """

    command: str
    alpha: float
    beta: float
    options: Dict[str, Any] = field(default_factory=dict)
    tol: float = DEFAULT_KERNEL_TOL
    seed: int = DEFAULT_SEED
    threads: int = 1
    output: Optional[str] = None
    fmt: str = "csv"
    verbose: bool = False

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ValidationError(f"Commande inconnue : {self.command}")
        if self.threads < 1:
            raise ValidationError("--threads doit être ≥ 1")
        if not (self.tol > 0):
            raise ValidationError("--tol doit être > 0")
        for key in ("mmax", "truncation", "nodes", "m", "n", "cases"):
            value = self.options.get(key)
            if value is not None and value < 0:
                raise ValidationError(f"--{key} doit être ≥ 0")
        for t in self.options.get("t") or []:
            if not np.isfinite(t) or t < 0:
                raise ValidationError(f"Temps invalide : {t}")
        # Construit et valide (α, β) avant tout calcul
        self.params

    @property
    def params(self) -> JacobiParams:
        return JacobiParams(self.alpha, self.beta)

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> "RunConfig":
        common = {"command", "alpha", "beta", "tol", "seed", "threads", "output",
                  "format", "verbose"}
        options = {k: v for k, v in vars(args).items() if k not in common}
        return cls(
            command=args.command,
            alpha=args.alpha,
            beta=args.beta,
            options=options,
            tol=args.tol,
            seed=args.seed,
            threads=args.threads,
            output=args.output,
            fmt=args.format,
            verbose=args.verbose,
        )

    def metadata(self) -> Dict[str, Any]:
        return asdict(self)


def parse_sequence(values: Optional[str], delta: Optional[int]) -> FiniteSequence:
    """Suite donnée par --f "v0,v1,..." ou par --delta k."""
    if values:
        try:
            return FiniteSequence([float(v) for v in values.split(",")])
        except ValueError as e:
            raise ValidationError(f"Suite --f invalide : {str(e)}")
    return FiniteSequence.delta(delta if delta is not None else 0)


# ---------------------------------------------------------------------------
# Exécution des sous-commandes
# ---------------------------------------------------------------------------

def _emit(config: RunConfig, frame: pd.DataFrame, exporter: ExportManager) -> None:
    if config.output:
        exporter.export_table(frame, config.output, config.fmt, config.metadata())
    else:
        print(frame.to_csv(index=False, float_format="%.17g", lineterminator="\n"), end="")


def _run_kernel(config: RunConfig, exporter: ExportManager) -> None:
    times = config.options["t"]
    mmax = config.options["mmax"]
    grids = tabulate_kernel_grid(config.params, times, mmax, config.tol, config.threads)
    if len(times) == 1 and config.fmt == "csv":
        if config.output:
            exporter.export_matrix(grids[0], config.output, config.metadata())
            return
        frame = pd.DataFrame(grids[0], columns=[str(n) for n in range(mmax + 1)])
        frame.insert(0, "m", np.arange(mmax + 1))
    else:
        frame = kernel_grid_frame(times, grids)
    _emit(config, frame, exporter)


def _run_apply(config: RunConfig, exporter: ExportManager, poisson: bool) -> None:
    f = parse_sequence(config.options.get("f"), config.options.get("delta"))
    times = sorted(set(config.options["t"]))
    truncation = config.options.get("truncation")
    if truncation is None:
        truncation = default_truncation(f, times[-1])
    if poisson:
        rows = []
        for t in times:
            state = apply_poisson(config.params, t, f, truncation,
                                  nodes=config.options.get("nodes") or DEFAULT_POISSON_NODES,
                                  tol=config.tol,
                                  method=config.options.get("method", "subordination"))
            rows.extend({"t": t, "n": n, "value": v} for n, v in enumerate(state.values))
        frame = pd.DataFrame(rows)
    else:
        trace = evolve_ivp(config.params, f, TimeGrid(tuple(times)), truncation,
                           check_pde=False)
        frame = trace.to_frame()
        if config.verbose:
            for t, e in zip(trace.times, trace.energies):
                print(f"⏱️  t = {t:g} : E = {e:.12g}", file=sys.stderr)
    _emit(config, frame, exporter)


def _run_maximal(config: RunConfig, exporter: ExportManager) -> None:
    f = parse_sequence(config.options.get("f"), config.options.get("delta"))
    grid = TimeGrid.logarithmic(config.options["grid_min"], config.options["grid_max"],
                                config.options["grid_points"])
    truncation = config.options.get("truncation")
    if truncation is None:
        truncation = default_truncation(f, grid.times[-1])
    heat = maximal_heat_sequence(config.params, f, grid, truncation,
                                 threads=config.threads)
    frame = pd.DataFrame({"n": np.arange(truncation + 1),
                          "f": f.padded(truncation + 1), "heat": heat})
    if not config.options.get("no_poisson"):
        frame["poisson"] = maximal_poisson_sequence(config.params, f, grid, truncation,
                                                    threads=config.threads)
    _emit(config, frame, exporter)


def _run_verify(config: RunConfig, exporter: ExportManager) -> None:
    suite = config.options["suite"]
    runner = InvariantSuiteRunner(
        config.params,
        cases=config.options.get("cases") or DEFAULT_CASES,
        seed=config.seed,
        threads=config.threads,
        verbose=config.verbose,
    )
    summaries = runner.run_all() if suite == "all" else [runner.run(suite)]
    for summary in summaries:
        residual = summary.get("max_residual")
        detail = f" (résidu max {residual:.3e})" if residual is not None else ""
        print(f"✅ {summary['suite']} : {summary['checks']} vérifications{detail}")
    if config.output:
        exporter.export_report(summaries, config.output, config.metadata())


def _run_linearize(config: RunConfig, exporter: ExportManager) -> None:
    row = linearization_coefficients(config.params, config.options["m"],
                                     config.options["n"])
    _emit(config, row.to_frame(), exporter)


def _run_quadrature(config: RunConfig, exporter: ExportManager) -> None:
    rule = gauss_jacobi_rule(config.params, config.options["nodes"] or 16)
    _emit(config, rule.to_frame(), exporter)


def _run_bench(config: RunConfig, exporter: ExportManager) -> None:
    timings: List[Dict[str, Any]] = []
    for size in (10, 20, 40):
        for t in config.options["t"]:
            heat_kernel_block.cache_clear()
            start = time.perf_counter()
            heat_kernel_block(config.params, t, size, size, config.tol)
            timings.append({"size": size, "t": t,
                            "seconds": round(time.perf_counter() - start, 6)})
            print(f"⏱️  bloc {size + 1}×{size + 1}, t = {t:g} : "
                  f"{timings[-1]['seconds']:.4f} s")
    if config.output:
        exporter.export_report(timings, config.output, config.metadata())


def run(config: RunConfig) -> int:
    """
    Exécute une configuration et retourne le code de sortie.

    Returns:
        0 succès, 1 validation, 2 non-convergence, 3 violation d'invariant
    """
    exporter = ExportManager(verbose=config.verbose or bool(config.output))
    try:
        if config.command == "kernel":
            _run_kernel(config, exporter)
        elif config.command in ("apply", "poisson"):
            _run_apply(config, exporter, poisson=config.command == "poisson")
        elif config.command == "maximal":
            _run_maximal(config, exporter)
        elif config.command == "verify":
            _run_verify(config, exporter)
        elif config.command == "linearize":
            _run_linearize(config, exporter)
        elif config.command == "quadrature":
            _run_quadrature(config, exporter)
        else:
            _run_bench(config, exporter)
        return 0

    except InvariantViolation as e:
        print(f"❌ Violation d'invariant : {str(e)}", file=sys.stderr)
        for key, value in e.witness.items():
            print(f"   {key} = {value}", file=sys.stderr)
        return e.exit_code
    except JacobiHeatError as e:
        print(f"❌ Erreur : {str(e)}", file=sys.stderr)
        return e.exit_code
    except RuntimeError as e:
        # Échecs d'export
        print(f"❌ {str(e)}", file=sys.stderr)
        return 1


def build_parser() -> argparse.ArgumentParser:
    """Construit le parseur d'arguments."""
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--alpha", type=float, default=0.0, help="Paramètre α > -1 (défaut: 0)")
    common.add_argument("--beta", type=float, default=0.0, help="Paramètre β > -1 (défaut: 0)")
    common.add_argument("--tol", type=float, default=DEFAULT_KERNEL_TOL,
                        help="Tolérance de convergence du noyau (défaut: 1e-12)")
    common.add_argument("--seed", type=int, default=DEFAULT_SEED,
                        help="Graine des cas aléatoires (défaut: 7)")
    common.add_argument("--threads", type=int, default=1,
                        help="Nombre maximal de threads (défaut: 1)")
    common.add_argument("--output", "-o", type=str, default=None,
                        help="Fichier de sortie (sinon CSV sur la sortie standard)")
    common.add_argument("--format", "-f", type=str, default="csv", choices=["csv", "json"],
                        help="Format de sortie (défaut: csv)")
    common.add_argument("--verbose", "-v", action="store_true",
                        help="Affichage détaillé du processus")

    parser = CliArgumentParser(
        description="Semi-groupes de la chaleur et de Poisson associés aux polynômes de Jacobi",
        epilog=__doc__,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = parser.add_subparsers(dest="command", required=True, parser_class=CliArgumentParser)

    kernel = sub.add_parser("kernel", parents=[common], help="Tabule K_t(m, n)")
    kernel.add_argument("--t", type=float, nargs="+", default=[1.0], help="Temps t ≥ 0")
    kernel.add_argument("--mmax", type=int, default=10, help="Indice maximal (défaut: 10)")

    for name, label in (("apply", "W_t f"), ("poisson", "P_t f")):
        command = sub.add_parser(name, parents=[common], help=f"Calcule {label}")
        command.add_argument("--t", type=float, nargs="+", default=[1.0], help="Temps t ≥ 0")
        command.add_argument("--f", type=str, default=None, help="Valeurs \"f0,f1,...\"")
        command.add_argument("--delta", type=int, default=None, help="f = δ_k")
        command.add_argument("--truncation", type=int, default=None,
                             help="Dernier indice calculé")
        if name == "poisson":
            command.add_argument("--method", choices=list(POISSON_METHODS),
                                 default="subordination",
                                 help="Subordination à W_t ou noyau de Poisson direct (défaut: subordination)")
            command.add_argument("--nodes", type=int, default=DEFAULT_POISSON_NODES,
                                 help=f"Nœuds de Gauss–Laguerre en subordination (défaut: {DEFAULT_POISSON_NODES})")

    maximal = sub.add_parser("maximal", parents=[common], help="Opérateurs maximaux W_*, P_*")
    maximal.add_argument("--f", type=str, default=None, help="Valeurs \"f0,f1,...\"")
    maximal.add_argument("--delta", type=int, default=None, help="f = δ_k")
    maximal.add_argument("--truncation", type=int, default=None, help="Dernier indice")
    maximal.add_argument("--grid-min", type=float, default=1e-3, help="Premier temps")
    maximal.add_argument("--grid-max", type=float, default=1e3, help="Dernier temps")
    maximal.add_argument("--grid-points", type=int, default=60, help="Nombre de temps")
    maximal.add_argument("--no-poisson", action="store_true", help="Sans P_*")

    verify = sub.add_parser("verify", parents=[common], help="Suites d'invariants")
    verify.add_argument("suite", choices=list(InvariantSuiteRunner.SUITES) + ["all"])
    verify.add_argument("--cases", type=int, default=DEFAULT_CASES,
                        help="Cas aléatoires par suite")

    linearize = sub.add_parser("linearize", parents=[common],
                               help="Coefficients de linéarisation de p_m p_n")
    linearize.add_argument("--m", type=int, required=True)
    linearize.add_argument("--n", type=int, required=True)

    quadrature = sub.add_parser("quadrature", parents=[common],
                                help="Règle de Gauss–Jacobi")
    quadrature.add_argument("--nodes", type=int, default=16)

    bench = sub.add_parser("bench", parents=[common], help="Mesure des temps de calcul")
    bench.add_argument("--t", type=float, nargs="+", default=[1.0, 10.0, 100.0])
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Fonction principale du programme."""
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = RunConfig.from_args(args)
    except ValidationError as e:
        print(f"❌ Erreur : {str(e)}", file=sys.stderr)
        return e.exit_code
    return run(config)


if __name__ == "__main__":
    sys.exit(main())
