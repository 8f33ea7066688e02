"""Shared random-input generators for the test suite."""

import numpy as np


def random_poly_text(rng, dim, degree=4, max_terms=6, scale=0.5):
    """Random polynomial of total degree <= degree as expression text.

    Coefficients stay small so the finite-difference oracle's 1/h^2 roundoff
    amplification remains well below the comparison tolerances.
    """
    terms = []
    for _ in range(int(rng.integers(1, max_terms + 1))):
        exps = [0] * dim
        for _ in range(int(rng.integers(0, degree + 1))):
            exps[int(rng.integers(dim))] += 1
        coeff = float(rng.uniform(-scale, scale))
        mono = "*".join(f"x{k + 1}^{e}" for k, e in enumerate(exps) if e)
        terms.append(f"{coeff!r}*{mono}" if mono else repr(coeff))
    return "+".join(terms)


def random_transcendental_text(rng, dim):
    """Domain-safe composition of the supported smooth functions on [-1, 1]^dim."""
    v1 = f"x{int(rng.integers(1, dim + 1))}"
    v2 = f"x{int(rng.integers(1, dim + 1))}"
    a = float(rng.uniform(-0.8, 0.8))
    b = float(rng.uniform(-0.8, 0.8))
    c = float(rng.uniform(1.5, 3.0))
    templates = [
        f"sin({a!r}*{v1})*cos({b!r}*{v2})",
        f"exp({a!r}*{v1}+{b!r}*{v2})",
        f"log({c!r}+{v1}^2+{v2}^2)",
        f"sqrt({c!r}+{v1}^2)",
        f"atan({v1}*{v2})",
        f"sinh({a!r}*{v1})*cosh({b!r}*{v2})",
        f"tan({0.4 * a!r}*{v1})+{b!r}*{v2}^2",
        f"({a!r}*{v1}+{v2}^2)/({c!r}+{v1}^2)",
    ]
    return templates[int(rng.integers(len(templates)))]


def random_symmetric(rng, n, scale=5.0):
    A = rng.uniform(-scale, scale, size=(n, n))
    return 0.5 * (A + A.T)


def assert_jets_agree(exact, fd, rel=1e-5, abs_floor=1e-7):
    for a, b in ((exact.gradient, fd.gradient), (exact.hessian, fd.hessian)):
        tol = rel * np.maximum(np.abs(a), np.abs(b)) + abs_floor
        worst = float(np.max(np.abs(a - b) - tol))
        assert worst <= 0.0, f"jet mismatch by {worst:.3e} beyond tolerance"
