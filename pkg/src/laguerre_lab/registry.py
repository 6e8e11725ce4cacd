"""Identity registry: the coverage map of everything the suites verify.

Every ResidualReport entry must carry an id listed here for its suite;
the suites emit exactly these ids at default configuration, and the
test suite asserts both directions.
"""

REGISTRY = {
    "moments": (
        "moment-positive",
        "hankel-positive-definite",
        "precision-doubling",
        "map-invariance",
    ),
    "recurrence": (
        "orthogonality",
        "alpha-sum-rule",
        "beta-positive",
        "hankel-product",
        "christoffel-darboux",
        "classical-limit",
    ),
    "ladder": (
        "aux-initial-r",
        "aux-initial-R",
        "aux-sign-R",
        "aux-sign-Rstar",
        "alpha-aux",
        "beta-aux",
        "iteration-agree",
        "ladder-lower",
        "ladder-raise",
        "compat-s1",
        "compat-s2",
        "compat-s2p",
        "s1-r-advance",
        "s2p-product",
        "sum-p-R",
        "sum-p-r-beta",
        "beta-det-ratio",
        "ladder-coeff-integral",
    ),
    "calculus": (
        "dlnh-t1",
        "dlnh-t2",
        "dp-t1",
        "dp-t2",
        "dlnbeta-t1",
        "dlnbeta-t2",
        "dalpha-t1",
        "dalpha-t2",
        "toda-alpha",
        "toda-beta",
        "toda-molecule",
        "toda-lndn",
        "riccati-S-t1",
        "riccati-S-t2",
        "riccati-r-t1",
        "riccati-r-t2",
        "pde-S-1",
        "pde-S-2",
        "fd-convergence-order",
        "rode-reduction",
        "rode-decay",
    ),
    "sigma-pde": (
        "H-def",
        "H-p-shift",
        "dH-t1",
        "dH-t2",
        "delta-identity",
        "delta-nonneg",
        "reconstruct-R",
        "reconstruct-Rstar",
        "reconstruct-r",
        "reconstruct-rstar",
        "H-from-aux",
        "sigma-pde",
        "sigma-pde-reduction",
        "delta-random",
    ),
    "scaling": (
        "scaled-R-plus-r",
        "scaled-Rstar-plus-rstar",
        "limit-R-identity",
        "limit-Rstar-identity",
        "dH-ds1-sign",
        "scaled-V-sign",
        "limit-pde-1",
        "limit-pde-2",
        "limit-H-expr",
        "limit-H-subst",
        "limit-H-pde",
        "convergence-slope",
        "reduced-limit",
    ),
    "equilibrium": (
        "support-eq1",
        "support-eq2",
        "density-normalization",
        "density-nonneg",
        "supplementary-v1",
        "supplementary-v2",
        "lagrange-eq",
        "degree9-root",
        "degree5-root",
        "limit-X",
        "limit-A",
        "mp-gap",
        "mp-rate",
        "appendix-1",
        "appendix-lnx",
        "appendix-x",
        "appendix-xinv1",
        "appendix-xinv2",
        "appendix-xinv3",
    ),
    "multitime": (
        "alpha-aux-3",
        "beta-aux-3",
        "dlnh-t1-3",
        "dlnh-t2-3",
        "dlnh-t3-3",
        "dp-t1-3",
        "dp-t2-3",
        "dp-t3-3",
        "toda-3-alpha",
        "toda-3-beta",
        "toda-3-molecule",
        "riccati-3-S-t1",
        "riccati-3-S-t2",
        "riccati-3-S-t3",
        "riccati-3-r-t1",
        "riccati-3-r-t2",
        "riccati-3-r-t3",
        "h3-reconstruct-R",
        "h3-reconstruct-Rstar",
        "h3-reconstruct-Rhat",
        "h3-reconstruct-r",
        "h3-reconstruct-rstar",
        "h3-reconstruct-rhat",
        "iteration-agree-3",
        "t3-continuity",
        "alpha-aux-m",
        "s1-anchor-m",
        "s1-chain-m-2",
        "s1-chain-m-3",
        "s1-chain-m-4",
        "s1-chain-m-5",
        "beta-sum-m",
        "s2p-product-m",
        "dH-t1-m",
        "dH-t2-m",
        "dH-t3-m",
        "dH-t4-m",
        "dH-t5-m",
        "s1-point-m",
        "s2p-point-m",
        "ladder-coeff-m",
    ),
}

SUITE_NAMES = tuple(REGISTRY)


def validate_ids(suite: str, entries) -> list:
    """Ids present in entries but missing from the registry (should be [])."""
    known = set(REGISTRY.get(suite, ()))
    return sorted({e.id for e in entries} - known)
