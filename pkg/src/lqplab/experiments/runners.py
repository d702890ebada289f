"""Experiment suites.

Each runner receives a validated config and an empty report, fills in check
records, results and CSV ladders, and lets library errors propagate;
:func:`run_experiment` turns those into the report's error section.
"""

import logging
import math
import time
from typing import Any, Callable, Dict, Optional

import numpy as np
import sympy

from lqplab.complex import (
    certificate_ratio,
    cohomology_dimension,
    corrector_constant,
    discretize,
    image_constant,
    load_complex,
    quotient_monotonicity,
    random_complex,
    torsion_check,
)
from lqplab.config.experiment import (
    BallWitnessExperiment,
    ComplexAnalyzeExperiment,
    FormSpec,
    HodgeExperiment,
    HyperbolicWitnessExperiment,
    LineWitnessExperiment,
    PdeSolveExperiment,
    PoincareExperiment,
    SmoothExperiment,
    SobolevVerifyConfig,
    exponent_value,
)
from lqplab.errors import (
    CheckFailure,
    ConfigError,
    IncompatibleSource,
    LqpLabError,
    NonConvergenceError,
)
from lqplab.experiments.registry import anchor
from lqplab.experiments.report import ExperimentReport, jsonable
from lqplab.forms import DifferentialForm, symbolic_form
from lqplab.forms.form import default_symbols
from lqplab.geometry import DiagonalMetric, build_grid
from lqplab.hodge import (
    DiscreteHodgeSystem,
    green,
    harmonic_dimension,
    hodge_decompose,
    image_identity_check,
    random_cochains,
    spectral_gap,
    verify_identities,
)
from lqplab.hodge.system import DENSE_LIMIT
from lqplab.homotopy import (
    HomotopyConfig,
    homotopy_residual,
    poincare_primitive,
    random_polynomial_form,
    symmetric_base,
)
from lqplab.pde import PLaplaceProblem, SolverOptions, gradient_check, solve
from lqplab.smoothing import (
    DeRhamDeformation,
    MollifierSpec,
    commutation_defect,
    continuity_defect,
    homotopy_A_residual,
    operator_norm_probe,
    regularization_ladder,
    regularize,
)
from lqplab.sobolev import (
    TrigFamily,
    estimate_constant,
    monotonicity_check,
    verify_solvability,
)
from lqplab.witnesses import (
    BallWitnessConfig,
    Verdict,
    WitnessReport,
    ball_witness,
    excluded_reduced_report,
    hyperbolic_nonvanishing,
    hyperbolic_witnesses,
    line_gaussian_ladder,
    line_plateau_ladder,
    line_reduced_ladder,
)

logger = logging.getLogger(__name__)


def _parse(text: str, symbols) -> sympy.Expr:
    names = {str(s): s for s in symbols}
    try:
        expr = sympy.sympify(text, locals=names)
    except (sympy.SympifyError, SyntaxError, TypeError) as e:
        raise ConfigError(f"Cannot parse expression {text!r}: {e}") from e
    unknown = expr.free_symbols - set(symbols)
    if unknown:
        raise ConfigError(
            f"Expression {text!r} uses {sorted(map(str, unknown))}; "
            f"coordinates are {[str(s) for s in symbols]}"
        )
    return expr


def build_form(spec: FormSpec, domain) -> DifferentialForm:
    """Symbolic form from a config entry, in the domain's coordinate names."""
    symbols = default_symbols(domain)
    exprs = [_parse(c, symbols) for c in spec.components]
    label = spec.label or " + ".join(spec.components)
    return symbolic_form(spec.degree, domain, exprs, symbols, label=label)


def _witness_checks(
    report: ExperimentReport, witness: WitnessReport, operation: str
) -> None:
    for name, ok in witness.checks.items():
        report.check(f"{witness.name}: {name}", bool(ok), True, bool(ok), operation)


# ---------------------------------------------------------------------------
# sobolev-verify
# ---------------------------------------------------------------------------


def run_sobolev_verify(cfg: SobolevVerifyConfig, report: ExperimentReport) -> None:
    domain = cfg.domain.build()
    family = TrigFamily(cfg.family.max_degree, tuple(cfg.family.phases))
    table = report.ladder(
        "resolution", ["resolution", "lower_bound", "exact", "best_member", "corrector"]
    )
    estimates = []
    for resolution in cfg.resolutions:
        est = estimate_constant(
            domain,
            cfg.degree,
            cfg.p,
            cfg.q,
            family,
            resolution,
            with_solvability=cfg.with_solvability,
        )
        estimates.append(est)
        corrector = est.solvability.value if est.solvability is not None else None
        table.add(
            resolution=resolution,
            lower_bound=est.lower_bound,
            exact=est.exact,
            best_member=est.best_member,
            corrector=corrector,
        )
        report.check(
            f"family ratio is a positive lower bound (N={resolution})",
            est.lower_bound,
            "> 0",
            est.lower_bound > 0.0,
            "sobolev.estimate_constant",
        )
        if est.exact is not None:
            slack = cfg.tolerances.consistency * est.exact
            report.check(
                f"lower bound below the spectral constant (N={resolution})",
                est.lower_bound,
                est.exact,
                est.lower_bound <= est.exact + slack,
                "sobolev.estimate_constant",
            )
        if corrector is not None:
            report.check(
                f"lower bound below the corrector constant (N={resolution})",
                est.lower_bound,
                corrector,
                None,
                "complex.corrector_constant",
            )
    bounds = [e.lower_bound for e in estimates]
    spread = max(bounds) / min(bounds) - 1.0
    report.check(
        "lower bounds stay bounded under refinement",
        spread,
        f"<= {cfg.tolerances.stabilization}",
        spread <= cfg.tolerances.stabilization,
        "sobolev.resolution_ladder",
    )
    report.results["estimates"] = [e.to_dict() for e in estimates]

    finest = cfg.resolutions[-1]
    for i, sample in enumerate(cfg.samples):
        omega = build_form(sample.form, domain)
        solved = verify_solvability(omega, cfg.p, cfg.q, finest)
        report.check(
            f"solvability of sample {i} ({omega.label})",
            "solvable" if solved.solvable else "obstructed",
            sample.expect,
            (sample.expect == "solvable") == solved.solvable,
            "sobolev.verify_solvability",
        )
        report.results.setdefault("samples", []).append(solved.to_dict())

    if cfg.holder is not None:
        grid = build_grid(domain, finest)
        members = family.members(domain, cfg.degree)
        holder = monotonicity_check(
            members, cfg.holder.q_small, cfg.holder.q_large, grid
        )
        report.check(
            "Hoelder embedding of L^{q2} into L^{q1}",
            sum(e.holds for e in holder.entries),
            len(holder.entries),
            holder.holds,
            "sobolev.monotonicity_check",
            "on finite volume, the q-norms increase with q after volume scaling",
        )
        report.results["holder"] = holder.to_dict()


# ---------------------------------------------------------------------------
# witnesses
# ---------------------------------------------------------------------------


def run_ball_witness(cfg: BallWitnessExperiment, report: ExperimentReport) -> None:
    config = BallWitnessConfig(
        exponent_value(cfg.p),
        exponent_value(cfg.q),
        n=cfg.n,
        k=cfg.k,
        mu=cfg.mu,
        t_ladder=tuple(cfg.t_ladder),
        ramp=cfg.ramp,
        radial_nodes=cfg.radial_nodes,
        angular_nodes=cfg.angular_nodes,
    )
    witness = ball_witness(config)
    checks = witness.checks
    step_one = checks["alpha_exponent"] and checks["alpha_quadrature"]
    step_one = step_one and checks["alpha_refinement_stable"]
    report.check(
        "step 1: alpha is closed and lies in L^p",
        witness.norms["alpha_Lp_quadrature"],
        witness.norms["alpha_Lp_exact"],
        step_one,
        "witnesses.ball_witness",
    )
    pairings = [witness.pairings[f"t={t:g}"] for t in cfg.t_ladder]
    report.check(
        "step 2: pairings int alpha ^ gamma_t stay bounded below",
        min(pairings),
        f">= {witness.tolerances['pairing_floor']}",
        checks["pairing_bounded_below"],
        "witnesses.ball_witness",
    )
    report.check(
        "step 3: ||d gamma_t||_{q'} decreases to zero",
        witness.ratio,
        "strictly decreasing",
        checks["differential_decreasing"],
        "witnesses.ball_witness",
    )
    report.check(
        "verdict",
        witness.verdict.value,
        Verdict.NONVANISHING.value,
        witness.verdict is Verdict.NONVANISHING,
        "witnesses.ball_witness",
    )
    table = report.ladder(
        "t_ladder", ["t", "pairing", "signed_pairing", "d_gamma", "gamma"]
    )
    for t in cfg.t_ladder:
        table.add(
            t=t,
            pairing=witness.pairings[f"t={t:g}"],
            signed_pairing=witness.pairings[f"signed_t={t:g}"],
            d_gamma=witness.norms[f"d_gamma_Lq'_t={t:g}"],
            gamma=witness.norms[f"gamma_Lp'_t={t:g}"],
        )
    report.results["witness"] = witness.to_dict()


def run_hyperbolic_witness(
    cfg: HyperbolicWitnessExperiment, report: ExperimentReport
) -> None:
    built = hyperbolic_witnesses(tuple(cfg.exponents), cfg.nodes_per_unit, cfg.z_max)
    _witness_checks(report, built.report, "witnesses.hyperbolic_witnesses")
    report.results["witnesses"] = built.report.to_dict()
    table = report.ladder("pairs", ["p", "q", "pairing", "verdict"])
    certificates = []
    for p, q in cfg.pairs:
        certificate = hyperbolic_nonvanishing(p, q, cfg.nodes_per_unit)
        _witness_checks(report, certificate, "witnesses.hyperbolic_nonvanishing")
        report.check(
            f"verdict at (p, q) = ({p}, {q})",
            certificate.verdict.value,
            Verdict.REDUCED_NONVANISHING.value,
            certificate.verdict is Verdict.REDUCED_NONVANISHING,
            "witnesses.hyperbolic_nonvanishing",
        )
        table.add(
            p=exponent_value(p),
            q=exponent_value(q),
            pairing=certificate.pairings.get("alpha_gamma"),
            verdict=certificate.verdict.value,
        )
        certificates.append(certificate.to_dict())
    report.results["certificates"] = certificates


def run_line_witness(cfg: LineWitnessExperiment, report: ExperimentReport) -> None:
    if cfg.plateau is not None:
        spec = cfg.plateau
        table = report.ladder("plateau", ["a", "ratio", "bound", "verdict"])
        reports = line_plateau_ladder(spec.a_values, spec.p, spec.q)
        for witness in reports:
            a = witness.parameters["a"]
            table.add(
                a=a,
                ratio=witness.ratio,
                bound=witness.bound,
                verdict=witness.verdict.value,
            )
            if witness.verdict is Verdict.EXCLUDED:
                report.check(
                    f"plateau a={a:g}",
                    "excluded",
                    "excluded",
                    None,
                    "witnesses.line_plateau_bound",
                )
                continue
            report.check(
                f"plateau ratio exceeds its lower bound (a={a:g})",
                witness.ratio,
                witness.bound,
                witness.passed,
                "witnesses.line_plateau_bound",
            )
        report.results["plateau"] = [r.to_dict() for r in reports]
    if cfg.gaussian is not None:
        spec_g = cfg.gaussian
        ladder = line_gaussian_ladder(spec_g.kappas, spec_g.p, spec_g.slope_tolerance)
        _witness_checks(report, ladder, "witnesses.line_gaussian_ladder")
        report.results["gaussian"] = ladder.to_dict()
    if cfg.reduced is not None:
        spec_r = cfg.reduced
        x = sympy.Symbol("x", real=True)
        omega = sympy.lambdify(x, _parse(spec_r.omega, (x,)), modules="numpy")
        if exponent_value(spec_r.p) == 1.0:
            excluded = [
                excluded_reduced_report(m, spec_r.omega) for m in spec_r.m_values
            ]
            report.check(
                "reduced approximation at p = 1",
                "excluded",
                "excluded",
                None,
                "witnesses.excluded_reduced_report",
            )
            report.results["reduced"] = [r.to_dict() for r in excluded]
            return
        table = report.ladder("reduced", ["m", "residual", "lambda_norm"])
        reports = line_reduced_ladder(
            lambda t: float(omega(t)), spec_r.m_values, spec_r.p, spec_r.omega
        )
        for witness in reports:
            m = witness.parameters["m"]
            table.add(
                m=m,
                residual=witness.norms.get("residual_p"),
                lambda_norm=witness.norms.get("lambda_p"),
            )
            report.check(
                f"d b_m approximates omega (m={m:g})",
                witness.norms.get("residual_p"),
                "decreasing in m",
                witness.passed,
                "witnesses.line_reduced_approx",
            )
        report.results["reduced"] = [r.to_dict() for r in reports]


# ---------------------------------------------------------------------------
# poincare / smooth
# ---------------------------------------------------------------------------


def run_poincare(cfg: PoincareExperiment, report: ExperimentReport) -> None:
    domain = cfg.domain.build()
    n = domain.dim
    omega = build_form(cfg.form, domain)
    planar_ball = domain.kind == "ball" and n == 2
    grid = build_grid(
        domain, tuple(cfg.resolution) if planar_ball else cfg.resolution[0]
    )
    if cfg.base.kind == "point":
        config = HomotopyConfig.point(cfg.base.point or [0.0] * n, cfg.radial_order)
    else:
        config = symmetric_base(
            n, cfg.base.radius, cfg.base.count, cfg.base.point, cfg.radial_order
        )
    primitive = poincare_primitive(
        omega, cfg.p, cfg.q, config, grid, closed_tolerance=cfg.tolerances.closed
    )
    report.check(
        "d(T omega) = omega on the grid",
        primitive.residual,
        f"<= {cfg.tolerances.residual}",
        primitive.residual <= cfg.tolerances.residual,
        "homotopy.poincare_primitive",
    )
    within = primitive.within_bound
    report.check(
        "||T omega||_q / ||omega||_p within the Riesz kernel bound",
        primitive.ratio,
        primitive.bound.kernel_norm,
        within,
        "homotopy.riesz_bound",
    )
    report.results["primitive"] = primitive.to_dict()
    report.results["base"] = config.to_dict()

    rng = np.random.default_rng(cfg.seed)
    table = report.ladder("homotopy_residuals", ["sample", "residual"])
    for i in range(cfg.random_forms):
        theta = random_polynomial_form(domain, cfg.form.degree, cfg.max_power, rng)
        residual = homotopy_residual(theta, config, grid)
        table.add(sample=i, residual=residual)
        report.check(
            f"homotopy formula on random polynomial form {i}",
            residual,
            f"<= {cfg.tolerances.residual}",
            residual <= cfg.tolerances.residual,
            "homotopy.homotopy_residual",
        )


def _ball_probes(center: np.ndarray, radius: float, count: int, rng) -> np.ndarray:
    n = center.size
    directions = rng.standard_normal((count, n))
    directions /= np.linalg.norm(directions, axis=1)[:, None]
    radii = 0.9 * radius * rng.uniform(0.0, 1.0, count) ** (1.0 / n)
    return center + radii[:, None] * directions


def run_smooth(cfg: SmoothExperiment, report: ExperimentReport) -> None:
    chart = cfg.chart.build()
    n = chart.dim
    omega = build_form(cfg.form, chart)
    center = np.asarray(cfg.center, dtype=float)
    deformation = DeRhamDeformation(center, cfg.radius)
    grid = build_grid(chart, cfg.resolution)
    metric = DiagonalMetric.euclidean(n)
    p, q = exponent_value(cfg.p), exponent_value(cfg.q)

    ladder = regularization_ladder(
        omega, deformation, cfg.epsilons, grid, p, cfg.mollifier_nodes, metric
    )
    table = report.ladder("epsilon", ["epsilon", "distance", "total_variation"])
    for i, eps in enumerate(ladder.epsilons):
        variation = ladder.total_variation[i] if ladder.total_variation else None
        table.add(epsilon=eps, distance=ladder.distances[i], total_variation=variation)
    report.check(
        "||R_eps omega - omega||_p decreases with eps",
        ladder.distances,
        "strictly decreasing",
        ladder.strictly_decreasing if len(ladder.distances) > 1 else None,
        "smoothing.regularization_ladder",
    )
    report.check(
        "coefficient variation does not grow under smoothing",
        ladder.total_variation,
        f"<= {ladder.reference_variation}",
        None,
        "smoothing.total_variation",
    )
    report.results["ladder"] = ladder.to_dict()

    mollifier = MollifierSpec.build(n, cfg.probe_epsilon, cfg.mollifier_nodes)
    smoothed = regularize(omega, deformation, mollifier)
    points = grid.points
    outside = np.linalg.norm(points - center, axis=1) >= cfg.radius
    if np.any(outside):
        jump = float(np.max(np.abs(smoothed(points[outside]) - omega(points[outside]))))
        report.check(
            "R_eps omega = omega outside the deformation ball",
            jump,
            f"<= {cfg.tolerances.outside}",
            jump <= cfg.tolerances.outside,
            "smoothing.regularize",
        )

    probe = operator_norm_probe([omega], deformation, mollifier, grid, p, q, metric)
    report.check(
        "graph-norm ratio of R_eps near one",
        probe.maximum,
        f"1 +- {cfg.tolerances.norm_ratio}",
        None,
        "smoothing.operator_norm_probe",
    )
    report.results["norm_probe"] = probe.to_dict()

    if n == 2:
        shift = np.full(n, 0.5 * cfg.probe_epsilon)
        jump = continuity_defect(deformation, shift)
        report.check(
            "s_v is continuous across the deformation sphere",
            jump,
            f"<= {cfg.tolerances.continuity}",
            jump <= cfg.tolerances.continuity,
            "smoothing.continuity_defect",
        )

    rng = np.random.default_rng(cfg.seed)
    probes = _ball_probes(center, cfg.radius, cfg.probe_points, rng)
    if omega.degree < n:
        report.check(
            "d R_eps = R_eps d at interior probes",
            commutation_defect(omega, deformation, mollifier, probes),
            "small",
            None,
            "smoothing.commutation_defect",
        )
    config = symmetric_base(n, 0.25 * cfg.radius, center=center)
    residual = homotopy_A_residual(omega, deformation, mollifier, config, probes)
    report.check(
        "(I - R_eps) omega = d A_eps omega + A_eps d omega",
        residual,
        f"<= {cfg.tolerances.homotopy_residual}",
        residual <= cfg.tolerances.homotopy_residual,
        "smoothing.homotopy_A",
    )


# ---------------------------------------------------------------------------
# pde-solve
# ---------------------------------------------------------------------------


def run_pde_solve(cfg: PdeSolveExperiment, report: ExperimentReport) -> None:
    domain = cfg.domain.build()
    source = build_form(cfg.source, domain)
    problem = PLaplaceProblem.build(source, cfg.p, cfg.resolution, q=cfg.q)
    defect = problem.defect
    report.results["compatibility"] = defect.to_dict()
    worst = float(np.max(np.abs(defect.vector)))
    options = SolverOptions(
        method=cfg.solver.method,
        rtol=cfg.solver.rtol,
        max_iterations=cfg.solver.max_iterations,
        anneal=cfg.solver.anneal,
    )
    report.results["solver"] = options.to_dict()

    if cfg.expect == "incompatible":
        report.check(
            "source pairs with a closed form",
            worst,
            f"> {defect.tolerance:.3e}",
            not defect.compatible,
            "pde.compatibility",
        )
        if defect.compatible:
            return
        try:
            solve(problem, options)
        except IncompatibleSource:
            refused = True
        else:
            refused = False
        report.check("solver refuses the source", refused, True, refused, "pde.solve")
        return

    report.check(
        "source is orthogonal to the discrete closed forms",
        worst,
        f"<= {defect.tolerance:.3e}",
        defect.compatible,
        "pde.compatibility",
    )
    theta, trace = solve(problem, options)
    table = report.ladder("trace", ["iteration", "energy", "step", "residual"])
    for row in trace.rows():
        table.add(**row)
    report.results["trace"] = trace.to_dict()
    if not trace.converged:
        raise NonConvergenceError(
            f"p-Laplace solve stopped ({trace.termination}) at residual "
            f"{trace.final_residual:.3e}",
            residual=trace.final_residual,
        )
    report.check(
        "weak residual below tolerance",
        trace.residual_regularized,
        f"<= {trace.tolerance:.3e}",
        trace.residual_regularized <= trace.tolerance,
        "pde.weak_residual",
    )
    report.check(
        "unregularized weak residual",
        trace.residual_unregularized,
        f"<= {trace.tolerance:.3e}",
        None,
        "pde.weak_residual",
    )
    report.check(
        "energy nonincreasing along accepted steps",
        trace.energies[-1],
        "monotone",
        trace.energy_nonincreasing(),
        "pde.solve",
    )
    system, k = problem.system, problem.degree
    energy = problem.energy(theta)
    report.results["energy"] = energy

    if k < system.dim and problem.p >= 1.5:
        error = gradient_check(problem, seed=cfg.seed)
        report.check(
            "weak gradient matches central differences",
            error,
            f"<= {cfg.tolerances.gradient}",
            error <= cfg.tolerances.gradient,
            "pde.energy",
        )

    rng = np.random.default_rng(cfg.seed)
    if k == 0:
        zeta = np.full(problem.size, rng.standard_normal())
    else:
        zeta = system.d[k - 1] @ rng.standard_normal(system.size(k - 1))
    shift = abs(problem.energy(theta + zeta) - energy)
    report.check(
        "energy unchanged by closed shifts",
        shift,
        f"<= {cfg.tolerances.gauge}",
        shift <= cfg.tolerances.gauge * max(1.0, abs(energy)),
        "pde.energy",
    )

    if cfg.reference is not None and k < system.dim:
        reference = build_form(cfg.reference, domain)
        target = system.cochain(reference.differential)  # type: ignore[arg-type]
        error = system.norm(k + 1, system.apply_d(k, theta) - target)
        report.check(
            "d theta matches the manufactured solution in L^2",
            error,
            f"<= {cfg.tolerances.reference}",
            error <= cfg.tolerances.reference,
            "pde.solve",
        )
    if problem.p == 2.0:
        expected = green(system, k, problem.alpha)
        scale = system.norm(k, expected)
        gap = system.norm(k, theta - expected)
        if scale > 0:
            gap /= scale
        report.check(
            "p = 2 solution equals G alpha",
            gap,
            f"<= {cfg.tolerances.green}",
            gap <= cfg.tolerances.green,
            "hodge.green",
        )


# ---------------------------------------------------------------------------
# hodge / complex-analyze
# ---------------------------------------------------------------------------


def _flat_gap(system: DiscreteHodgeSystem) -> float:
    return float(
        min(
            (2.0 - 2.0 * math.cos(2.0 * math.pi / n_nodes)) / h**2
            for n_nodes, h in zip(system.grid.shape, system.grid.spacing)
        )
    )


def run_hodge(cfg: HodgeExperiment, report: ExperimentReport) -> None:
    domain = cfg.domain.build()
    grid = build_grid(domain, cfg.resolution)
    system = DiscreteHodgeSystem.build(grid)
    n = system.dim
    degrees = cfg.degrees if cfg.degrees is not None else list(range(n + 1))
    table = report.ladder(
        "degrees",
        ["degree", "spectral_gap", "harmonic_dimension", "worst_identity_error"],
    )
    for k in degrees:
        samples = random_cochains(system, k, cfg.samples, seed=cfg.seed + k)
        identities = verify_identities(system, k, samples, cfg.tolerances.identity)
        worst = max(identities.errors.values())
        report.check(
            f"Green operator identities in degree {k}",
            worst,
            f"<= {cfg.tolerances.identity}",
            identities.passed,
            "hodge.verify_identities",
        )
        gap = spectral_gap(system, k)
        if system.uniform:
            expected_gap = _flat_gap(system)
            report.check(
                f"spectral gap in degree {k}",
                gap,
                expected_gap,
                abs(gap - expected_gap) <= 1e-8 * expected_gap,
                "hodge.spectral_gap",
            )
        else:
            report.check(
                f"spectral gap in degree {k}", gap, "> 0", gap > 0, "hodge.spectral_gap"
            )
        dimension: Optional[int] = None
        if system.size(k) <= DENSE_LIMIT:
            dimension = harmonic_dimension(system, k)
            betti = math.comb(n, k)
            report.check(
                f"harmonic {k}-forms have dimension C({n}, {k})",
                dimension,
                betti,
                dimension == betti,
                "hodge.harmonic_basis",
            )
        split = hodge_decompose(system, k, samples[0])
        report.check(
            f"decomposition of a random {k}-cochain",
            max(split.reconstruction_error, split.orthogonality_error),
            f"<= {cfg.tolerances.decomposition}",
            max(split.reconstruction_error, split.orthogonality_error)
            <= cfg.tolerances.decomposition,
            "hodge.hodge_decompose",
        )
        if cfg.image_identity and k < n and system.size(k + 1) <= DENSE_LIMIT:
            images = image_identity_check(system, k, cfg.tolerances.identity)
            report.check(
                f"Im(delta d) = Im(delta) in degree {k}",
                max(images.residual_delta_in_delta_d, images.residual_delta_d_in_delta),
                f"ranks equal, residuals <= {cfg.tolerances.identity}",
                images.holds,
                "hodge.image_identity_check",
            )
        table.add(
            degree=k,
            spectral_gap=gap,
            harmonic_dimension=dimension,
            worst_identity_error=worst,
        )
        report.results[f"degree_{k}"] = {
            "errors": identities.errors,
            "spectral_gap": gap,
        }

    if cfg.form is not None:
        omega = build_form(cfg.form, domain)
        k = omega.degree
        split = hodge_decompose(system, k, system.cochain(omega))
        report.check(
            f"decomposition of {omega.label}",
            split.reconstruction_error,
            f"<= {cfg.tolerances.decomposition}",
            split.reconstruction_error <= cfg.tolerances.decomposition
            and split.orthogonality_error <= cfg.tolerances.decomposition,
            "hodge.hodge_decompose",
        )
        report.results["form"] = {
            "label": omega.label,
            "norms": {
                "exact": system.norm(k, split.exact),
                "coexact": system.norm(k, split.coexact),
                "harmonic": system.norm(k, split.harmonic),
            },
            "inner_products": split.inner_products,
        }


def _load_source(cfg: ComplexAnalyzeExperiment):
    if cfg.path is not None:
        return load_complex(cfg.path)
    if cfg.discretized is not None:
        domain = cfg.discretized.domain.build()
        grid = build_grid(domain, cfg.discretized.resolution)
        return discretize(domain, DiagonalMetric.euclidean(domain.dim), grid)
    assert cfg.random is not None
    rng = np.random.default_rng(cfg.seed)
    return random_complex(cfg.random.dims, rng, cfg.random.ranks)


def run_complex_analyze(
    cfg: ComplexAnalyzeExperiment, report: ExperimentReport
) -> None:
    complex_ = _load_source(cfg)
    report.results["dims"] = list(complex_.dims)
    cohomology = {}
    for k in range(complex_.top + 1):
        torsion = torsion_check(complex_, k)
        cohomology[k] = cohomology_dimension(complex_, k)
        report.check(
            f"torsion vanishes at level {k}",
            torsion.dimension,
            0,
            torsion.is_zero,
            "complex.torsion_check",
        )
    report.results["cohomology"] = cohomology
    for k, expected in sorted(cfg.expected_cohomology.items()):
        report.check(
            f"cohomology dimension at level {k}",
            cohomology.get(k),
            expected,
            cohomology.get(k) == expected,
            "complex.cohomology_dimension",
        )

    levels = cfg.levels if cfg.levels is not None else list(range(1, complex_.top + 1))
    table = report.ladder("levels", ["level", "cohomology", "corrector", "image"])
    constants = []
    for k in levels:
        corrector = corrector_constant(complex_, k, cfg.p, cfg.q, seed=cfg.seed)
        image = image_constant(complex_, k, cfg.p, cfg.q, seed=cfg.seed)
        table.add(
            level=k,
            cohomology=cohomology[k],
            corrector=corrector.value,
            image=image.value,
        )
        constants.append({"corrector": corrector.to_dict(), "image": image.to_dict()})
        report.check(
            f"corrector constant at most twice the image constant (level {k})",
            corrector.value,
            2.0 * image.value,
            corrector.value <= 2.0 * image.value * (1.0 + 1e-9) + 1e-12,
            "complex.corrector_constant",
        )
        if corrector.reachable:
            achieved = certificate_ratio(complex_, corrector)
            gap = abs(achieved - corrector.value) / (corrector.value or 1.0)
            report.check(
                f"corrector certificate reproduces the constant (level {k})",
                achieved,
                corrector.value,
                gap <= cfg.tolerances.certificate,
                "complex.certificate_ratio",
            )
        if cfg.q_large is not None:
            monotone = quotient_monotonicity(
                complex_, k, cfg.p, cfg.q, cfg.q_large, cfg.seed
            )
            report.check(
                f"corrector constants respect the Hoelder embedding (level {k})",
                monotone.constant_small,
                monotone.factor * monotone.constant_large,
                monotone.holds,
                "complex.quotient_monotonicity",
            )
    report.results["constants"] = constants


# ---------------------------------------------------------------------------
# dispatch
# ---------------------------------------------------------------------------

RUNNERS: Dict[str, Callable[[Any, ExperimentReport], None]] = {
    "sobolev-verify": run_sobolev_verify,
    "ball-witness": run_ball_witness,
    "hyperbolic-witness": run_hyperbolic_witness,
    "line-witness": run_line_witness,
    "poincare": run_poincare,
    "smooth": run_smooth,
    "pde-solve": run_pde_solve,
    "hodge": run_hodge,
    "complex-analyze": run_complex_analyze,
}

EXIT_OK, EXIT_CHECK_FAILED, EXIT_CONFIG, EXIT_NONCONVERGENCE = 0, 1, 2, 3


def _error_section(error: LqpLabError) -> Dict[str, Any]:
    section: Dict[str, Any] = {"type": type(error).__name__, "message": str(error)}
    for attribute in ("interval", "residual", "bracket", "nodes"):
        value = getattr(error, attribute, None)
        if value is not None:
            section[attribute] = jsonable(value)
    defect = getattr(error, "defect", None)
    if defect is not None:
        section["defect"] = jsonable(
            defect.to_dict() if hasattr(defect, "to_dict") else defect
        )
    return section


def exit_code_for(error: Optional[BaseException]) -> int:
    if error is None:
        return EXIT_OK
    if isinstance(error, NonConvergenceError):
        return EXIT_NONCONVERGENCE
    if isinstance(error, CheckFailure):
        return EXIT_CHECK_FAILED
    if isinstance(error, LqpLabError):
        return EXIT_CONFIG
    return EXIT_CHECK_FAILED


def run_experiment(config: Any) -> ExperimentReport:
    """Run one validated experiment; library errors end up in ``report.error``.

    The exit code for the run is ``report.exit_code``.
    """
    report = ExperimentReport(
        config.kind,
        config.name,
        anchor(config.kind),
        jsonable(config.model_dump(mode="json")),
    )
    runner = RUNNERS[config.kind]
    logger.info("Running %s experiment '%s'", config.kind, config.name)
    start = time.perf_counter()
    try:
        runner(config, report)
    except LqpLabError as e:
        logger.error("%s experiment '%s' stopped: %s", config.kind, config.name, e)
        report.error = _error_section(e)
        report.exit_code = exit_code_for(e)
    else:
        report.exit_code = EXIT_OK if report.passed else EXIT_CHECK_FAILED
    elapsed = time.perf_counter() - start
    logger.info(
        "%s experiment '%s' finished in %.2fs: %d checks, %d failed",
        config.kind,
        config.name,
        elapsed,
        len(report.checks),
        len(report.failures),
    )
    if config.record_timing:
        report.timing = elapsed
    return report
