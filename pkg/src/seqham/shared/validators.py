"""Input validation utilities for seqham."""

import dataclasses
import math
import os
import typing
from collections.abc import Mapping, Sequence
from pathlib import Path
from typing import Any, TypeVar

P = TypeVar("P")


class ValidationError(ValueError):
    """Raised when validation fails."""

    pass


class CapExceededError(ValidationError):
    """Raised when an exact solver is asked to handle more vertices than its cap."""

    pass


def validate_vertex_count(n: int | str, minimum: int = 1) -> int:
    """Validate a vertex count.

    Args:
        n: Vertex count to validate
        minimum: Smallest accepted value

    Returns:
        Validated vertex count as integer

    Raises:
        ValidationError: If n is not an integer or is below ``minimum``
    """
    try:
        n_int = int(n)
    except (ValueError, TypeError):
        raise ValidationError(f"Vertex count must be an integer, got: {n}")

    if n_int < minimum:
        raise ValidationError(f"Vertex count must be at least {minimum}, got: {n_int}")

    return n_int


def validate_probability(p: float | str, name: str = "p") -> float:
    """Validate a probability lies in [0, 1].

    Raises:
        ValidationError: If p is not a number in [0, 1]
    """
    try:
        p_float = float(p)
    except (ValueError, TypeError):
        raise ValidationError(f"{name} must be a number, got: {p}")

    if math.isnan(p_float) or not 0.0 <= p_float <= 1.0:
        raise ValidationError(f"{name} must be between 0 and 1, got: {p_float}")

    return p_float


def validate_distribution(alpha: Sequence[float], tol: float = 1e-9) -> tuple[float, ...]:
    """Validate a colour distribution: positive entries summing to one.

    Returns:
        The distribution as a tuple of floats

    Raises:
        ValidationError: If alpha is empty, has a non-positive entry or is not normalised
    """
    if not alpha:
        raise ValidationError("Colour distribution cannot be empty")

    values = tuple(float(a) for a in alpha)
    if any(a <= 0 for a in values):
        raise ValidationError(f"Colour distribution entries must be positive, got: {values}")

    if abs(sum(values) - 1.0) > tol:
        raise ValidationError(f"Colour distribution must sum to 1, got sum {sum(values):.12g}")

    return values


def validate_class_sizes(n: int, class_sizes: Sequence[int]) -> tuple[int, ...]:
    """Validate vertex colour class sizes: positive integers summing to n."""
    sizes = tuple(int(s) for s in class_sizes)
    if not sizes:
        raise ValidationError("Class sizes cannot be empty")

    if any(s <= 0 for s in sizes):
        raise ValidationError(f"Class sizes must be positive, got: {sizes}")

    if sum(sizes) != n:
        raise ValidationError(f"Class sizes must sum to n={n}, got sum {sum(sizes)}")

    return sizes


def validate_cap(n: int, cap: int, what: str) -> int:
    """Ensure an exact solver is only run at or below its size cap.

    Raises:
        CapExceededError: If n exceeds cap
    """
    if n > cap:
        raise CapExceededError(f"{what} is limited to n <= {cap}, got n={n}")
    return n


def resolve_cap(env_var: str, default: int) -> int:
    """Read a cap override from the environment, falling back to the default."""
    raw = os.getenv(env_var)
    if raw is None:
        return default
    try:
        value = int(raw)
    except ValueError:
        raise ValidationError(f"{env_var} must be an integer, got: {raw}")
    if value < 1:
        raise ValidationError(f"{env_var} must be positive, got: {value}")
    return value


def parse_grid(spec: str) -> tuple[float, ...]:
    """Parse a ``lo:hi:step`` grid (inclusive of hi up to rounding) or a comma list.

    Returns:
        Strictly increasing tuple of grid points

    Raises:
        ValidationError: If the grid is malformed, empty or not strictly increasing
    """
    if not isinstance(spec, str) or not spec.strip():
        raise ValidationError("Grid specification cannot be empty")

    try:
        if ":" in spec:
            parts = [float(x) for x in spec.split(":")]
            if len(parts) != 3:
                raise ValidationError(f"Grid must look like lo:hi:step, got: {spec}")
            lo, hi, step = parts
            if step <= 0:
                raise ValidationError(f"Grid step must be positive, got: {step}")
            count = int(math.floor((hi - lo) / step + 1e-9)) + 1
            points = tuple(round(lo + i * step, 12) for i in range(max(count, 0)))
        else:
            points = tuple(float(x) for x in spec.split(","))
    except ValueError as e:
        if isinstance(e, ValidationError):
            raise
        raise ValidationError(f"Grid contains a non-numeric entry: {spec}")

    return validate_grid(points)


def validate_grid(points: Sequence[float]) -> tuple[float, ...]:
    """Validate a sweep grid is non-empty and strictly increasing."""
    grid = tuple(float(x) for x in points)
    if not grid:
        raise ValidationError("Grid cannot be empty")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise ValidationError(f"Grid must be strictly increasing, got: {grid}")
    return grid


def validate_output_path(path: str | Path) -> Path:
    """Validate an output file path: its directory must exist and be writable.

    Raises:
        ValidationError: If the parent directory is missing or not writable
    """
    try:
        path_obj = Path(path)
    except (TypeError, ValueError) as e:
        raise ValidationError(f"Invalid path: {e}")

    parent = path_obj.resolve().parent
    if not parent.exists():
        raise ValidationError(f"Output directory does not exist: {parent}")
    if not os.access(parent, os.W_OK):
        raise ValidationError(f"Output directory is not writable: {parent}")
    if path_obj.is_dir():
        raise ValidationError(f"Output path is a directory: {path_obj}")

    return path_obj


_TRUE = {"1", "true", "yes", "on"}
_FALSE = {"0", "false", "no", "off"}


def _coerce(name: str, hint: Any, raw: Any) -> Any:
    if not isinstance(raw, str):
        return raw
    args = typing.get_args(hint)
    if type(None) in args:
        if raw.strip().lower() in ("", "none"):
            return None
        hint = next(a for a in args if a is not type(None))
    if hint is bool:
        value = raw.strip().lower()
        if value in _TRUE:
            return True
        if value in _FALSE:
            return False
        raise ValidationError(f"Parameter {name} expects a boolean, got: {raw}")
    try:
        return hint(raw)
    except (TypeError, ValueError):
        raise ValidationError(f"Parameter {name} expects {getattr(hint, '__name__', hint)}, got: {raw}")


def apply_overrides(params: P, overrides: Mapping[str, Any]) -> P:
    """Return a copy of a parameter dataclass with string overrides parsed by field type.

    Raises:
        ValidationError: On an unknown key or a value that does not parse
    """
    names = [f.name for f in dataclasses.fields(params)]
    hints = typing.get_type_hints(type(params))
    changes = {}
    for key, raw in overrides.items():
        if key not in names:
            raise ValidationError(f"Unknown parameter {key!r}; expected one of {', '.join(names)}")
        changes[key] = _coerce(key, hints[key], raw)
    return dataclasses.replace(params, **changes)


def parse_key_values(items: Sequence[str]) -> dict[str, str]:
    """Parse repeated ``key=value`` options into a dict."""
    parsed: dict[str, str] = {}
    for item in items:
        key, sep, value = item.partition("=")
        if not sep or not key.strip():
            raise ValidationError(f"Expected key=value, got: {item}")
        parsed[key.strip()] = value.strip()
    return parsed
