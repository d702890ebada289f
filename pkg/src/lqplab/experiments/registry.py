"""Static metadata of the experiment kinds."""

from dataclasses import dataclass
from typing import Dict, List


@dataclass(frozen=True)
class ExperimentKind:
    name: str
    anchor: str
    summary: str


KINDS: Dict[str, ExperimentKind] = {
    kind.name: kind
    for kind in (
        ExperimentKind(
            "sobolev-verify",
            "Sobolev inequality for forms holds iff the torsion of the L_{q,p} "
            "cohomology vanishes",
            "best-constant lower bounds on circles and tori along a resolution ladder",
        ),
        ExperimentKind(
            "ball-witness",
            "L_{q,p} cohomology of the ball does not vanish outside the Sobolev range",
            "closed alpha in L^p paired against a sequence gamma_t with d gamma_t -> 0",
        ),
        ExperimentKind(
            "hyperbolic-witness",
            "reduced L_{q,p} cohomology of the hyperbolic plane in degree one is "
            "nonzero",
            "compactly built horocyclic witnesses f, g and the pairing of df with dg",
        ),
        ExperimentKind(
            "line-witness",
            "first L_{q,p} cohomology of the real line: torsion for q < inf and "
            "vanishing reduced cohomology for p > 1",
            "plateau and Gaussian lower bounds, "
            "approximation of 1-forms by differentials",
        ),
        ExperimentKind(
            "poincare",
            "Poincare lemma with L^q/L^p bounds on convex domains through the averaged "
            "homotopy operator",
            "primitive T omega of a closed form and the Riesz kernel bound",
        ),
        ExperimentKind(
            "smooth",
            "de Rham regularization in a chart is bounded "
            "and homotopic to the identity",
            "R_eps convergence ladder, graph-norm ratios and the homotopy formula",
        ),
        ExperimentKind(
            "pde-solve",
            "the p-Laplace equation on forms is solvable exactly when the source is "
            "orthogonal to the closed forms",
            "energy minimization with Armijo line search and a weak-residual check",
        ),
        ExperimentKind(
            "hodge",
            "Hodge-Kodaira decomposition and the Green operator identities of the "
            "L^2 complex",
            "discrete d, delta, Laplacian, harmonic projection and Green operator",
        ),
        ExperimentKind(
            "complex-analyze",
            "in a Banach complex, closed range is equivalent to a bounded corrector "
            "constant, which is at most twice the image constant",
            "cohomology, torsion and best constants of a finite weighted complex",
        ),
    )
}


def anchor(kind: str) -> str:
    return KINDS[kind].anchor


def listing() -> List[str]:
    """One line per kind, ``name -> anchor``, in registry order."""
    return [f"{k.name} -> {k.anchor}" for k in KINDS.values()]
