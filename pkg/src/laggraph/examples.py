"""Built-in example surfaces for exercising the theorem checks."""

from __future__ import annotations

from dataclasses import dataclass

from .bernstein import ConfigError
from .expr import Expression, parse
from .fields import GridDomain

__all__ = ["EXAMPLE_IDS", "GeneratedExample", "generate_example"]

EXAMPLE_IDS = ("affine", "quad-iso", "saddle", "quartic")


@dataclass
class GeneratedExample:
    example: str
    text: str
    expression: Expression
    domain: GridDomain


def generate_example(
    example_id: str,
    dim: int,
    a: tuple | None = None,
    c: float = 1.0,
) -> GeneratedExample:
    """An example expression plus its recommended sampling box.

    affine:   a.x + (c/2)|x|^2       (affine conclusion case)
    quad-iso: (c/2)|x|^2             (isotropic Hessian c*Id)
    saddle:   (x1^2 - x2^2)/2        (special Lagrangian witness, dim 2 only)
    quartic:  sum_k xk^4             (fails the H-minimality hypotheses)
    """
    if example_id not in EXAMPLE_IDS:
        raise ConfigError(f"unknown example {example_id!r}; choose from {EXAMPLE_IDS}")
    if not isinstance(dim, int) or dim < 2:
        raise ConfigError(f"examples require integer dim >= 2, got {dim!r}")

    squares = "+".join(f"x{k}^2" for k in range(1, dim + 1))
    if example_id == "affine":
        coeffs = tuple(float(v) for v in (a if a is not None else (1.0,) * dim))
        if len(coeffs) != dim:
            raise ConfigError(f"affine needs {dim} linear coefficients, got {len(coeffs)}")
        linear = "+".join(f"{coeff!r}*x{k}" for k, coeff in enumerate(coeffs, start=1))
        text = f"{linear}+{float(c) / 2.0!r}*({squares})"
    elif example_id == "quad-iso":
        text = f"{float(c) / 2.0!r}*({squares})"
    elif example_id == "saddle":
        if dim != 2:
            raise ConfigError("saddle is defined for dim 2 only")
        text = "0.5*(x1^2-x2^2)"
    else:
        text = "+".join(f"x{k}^4" for k in range(1, dim + 1))

    domain = GridDomain(lower=(-1.0,) * dim, upper=(1.0,) * dim, resolution=(41,) * dim)
    return GeneratedExample(
        example=example_id,
        text=text,
        expression=parse(text, dim),
        domain=domain,
    )
