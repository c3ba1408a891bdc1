"""
JSON experiment configurations.

A configuration file holds one experiment object or ``{"experiments": [...]}``.
Expression trees are nested objects discriminated by ``"node"``; see
docs/REFERENCE.md for the schema. Every error names the JSON path of the
offending entry, e.g. ``$.experiments[0].A.terms[1].function``.
"""

from __future__ import annotations

import json
import logging
from collections.abc import Callable, Mapping
from fractions import Fraction
from pathlib import Path
from typing import Any

from .coefficients import (
    CoefficientProvider,
    GeneratingFunction,
    Separable,
    banded,
    catalog_function,
    freeze_block,
)
from .errors import CoefficientError, ConfigError, ConstructionError
from .experiments import DEFAULT_N_LIST, ExperimentSpec
from .sequences import (
    Congruence,
    DiagSampling,
    FractionalPower,
    Identity,
    Product,
    ScalarScale,
    ScaleRule,
    SequenceExpr,
    Sum,
    Toeplitz,
)
from .spectra import ZERO_THRESHOLD
from .symbol import DEFAULT_GRID, zero_symbol
from .weights import SamplingWeight, catalog_weight

logger = logging.getLogger(__name__)

NODE_TYPES = ("toeplitz", "diag_sampling", "identity", "sum", "product", "scale", "congruence", "power")


class _Context:
    """Levels and block size every node of the current experiment must have."""

    def __init__(self, levels: int, block_size: int) -> None:
        self.levels = levels
        self.block_size = block_size


def _require(obj: Mapping[str, Any], key: str, path: str) -> Any:
    if key not in obj:
        raise ConfigError(path, f"missing key '{key}'")
    return obj[key]


def _mapping(value: Any, path: str) -> Mapping[str, Any]:
    if not isinstance(value, Mapping):
        raise ConfigError(path, f"expected an object, got {type(value).__name__}")
    return value


def _list(value: Any, path: str) -> list[Any]:
    if not isinstance(value, list) or not value:
        raise ConfigError(path, "expected a non-empty array")
    return value


def _int(value: Any, path: str, minimum: int = 1) -> int:
    if isinstance(value, bool) or not isinstance(value, int) or value < minimum:
        raise ConfigError(path, f"expected an integer >= {minimum}, got {value!r}")
    return value


def _rational(value: Any, path: str) -> Fraction:
    if isinstance(value, bool):
        raise ConfigError(path, f"expected a number, got {value!r}")
    try:
        if isinstance(value, float):
            return Fraction(value).limit_denominator(10**12)
        return Fraction(value)
    except (TypeError, ValueError, ZeroDivisionError) as err:
        raise ConfigError(path, f"expected a number or a rational string such as '1/3', got {value!r}") from err


def _params(obj: Mapping[str, Any], path: str) -> dict[str, Any]:
    params: dict[str, Any] = {}
    for key, value in obj.items():
        if key == "name":
            continue
        if isinstance(value, str):
            params[key] = _rational(value, f"{path}.{key}")
        else:
            params[key] = value
    return params


def _function(obj: Any, path: str, ctx: _Context) -> GeneratingFunction:
    spec = _mapping(obj, path)
    name = _require(spec, "name", path)
    if name == "separable":
        factors = _list(_require(spec, "factors", path), f"{path}.factors")
        parts = tuple(
            _function(item, f"{path}.factors[{i}]", _Context(1, ctx.block_size))
            for i, item in enumerate(factors)
        )
        function: GeneratingFunction = Separable(parts)
    elif name == "banded":
        coefficients = _mapping(_require(spec, "coefficients", path), f"{path}.coefficients")
        table: dict[Any, complex] = {}
        for key, value in coefficients.items():
            where = f"{path}.coefficients.{key}"
            try:
                index = tuple(int(v) for v in str(key).split(","))
            except ValueError as err:
                raise ConfigError(where, "keys must be integers or comma-separated integers") from err
            table[index[0] if ctx.levels == 1 and len(index) == 1 else index] = complex(
                float(_rational(value, where))
            )
        try:
            function = banded(table, levels=ctx.levels)
        except CoefficientError as err:
            raise ConfigError(f"{path}.coefficients", str(err)) from err
    else:
        try:
            function = catalog_function(str(name), **_params(spec, path))
        except (CoefficientError, TypeError, ValueError) as err:
            raise ConfigError(path, str(err)) from err
    if function.levels != ctx.levels:
        raise ConfigError(path, f"function has {function.levels} level(s), the experiment has d={ctx.levels}")
    return function


def _block(obj: Mapping[str, Any], path: str, ctx: _Context) -> Any:
    raw = obj.get("block")
    if raw is None:
        if ctx.block_size != 1:
            raise ConfigError(path, f"'block' is required when r={ctx.block_size}")
        return ((1 + 0j,),)
    try:
        block = freeze_block([[float(_rational(v, f"{path}.block")) for v in row] for row in raw])
    except (CoefficientError, TypeError) as err:
        raise ConfigError(f"{path}.block", str(err)) from err
    if len(block) != ctx.block_size:
        raise ConfigError(f"{path}.block", f"block is {len(block)} x {len(block)} but r={ctx.block_size}")
    return block


def _toeplitz(obj: Mapping[str, Any], path: str, ctx: _Context, common: dict[str, Any]) -> SequenceExpr:
    function = _function(_require(obj, "function", path), f"{path}.function", ctx)
    return Toeplitz(provider=CoefficientProvider(function, _block(obj, path, ctx)), **common)


def _diag_sampling(obj: Mapping[str, Any], path: str, ctx: _Context, common: dict[str, Any]) -> SequenceExpr:
    if "weights" in obj:
        raw = _list(obj["weights"], f"{path}.weights")
        entries = [(item, f"{path}.weights[{i}]") for i, item in enumerate(raw)]
    else:
        entries = [(_require(obj, "weight", path), f"{path}.weight")]
    if len(entries) != ctx.levels:
        raise ConfigError(path, f"{len(entries)} weight(s) given for d={ctx.levels}")
    factors = []
    for item, where in entries:
        spec = _mapping(item, where)
        try:
            factors.append(catalog_weight(str(_require(spec, "name", where)), **_params(spec, where)))
        except CoefficientError as err:
            raise ConfigError(where, str(err)) from err
    return DiagSampling(weight=SamplingWeight(tuple(factors), _block(obj, path, ctx)), **common)


def _identity(obj: Mapping[str, Any], path: str, ctx: _Context, common: dict[str, Any]) -> SequenceExpr:
    size = _int(obj.get("size", ctx.block_size), f"{path}.size")
    return Identity(size=size, dims=ctx.levels, **common)


def _operands(obj: Mapping[str, Any], key: str, path: str, ctx: _Context) -> tuple[SequenceExpr, ...]:
    items = _list(_require(obj, key, path), f"{path}.{key}")
    return tuple(_node(item, f"{path}.{key}[{i}]", ctx) for i, item in enumerate(items))


def _sum(obj: Mapping[str, Any], path: str, ctx: _Context, common: dict[str, Any]) -> SequenceExpr:
    return Sum(operands=_operands(obj, "terms", path, ctx), **common)


def _product(obj: Mapping[str, Any], path: str, ctx: _Context, common: dict[str, Any]) -> SequenceExpr:
    return Product(operands=_operands(obj, "factors", path, ctx), **common)


def _scale(obj: Mapping[str, Any], path: str, ctx: _Context, common: dict[str, Any]) -> SequenceExpr:
    rule = ScaleRule(
        exponent=_rational(_require(obj, "exponent", path), f"{path}.exponent"),
        factor=_rational(obj.get("factor", 1), f"{path}.factor"),
        base=_rational(obj.get("base", 1), f"{path}.base"),
    )
    operand = _node(_require(obj, "operand", path), f"{path}.operand", ctx)
    return ScalarScale(rule=rule, operand=operand, **common)


def _congruence(obj: Mapping[str, Any], path: str, ctx: _Context, common: dict[str, Any]) -> SequenceExpr:
    inner = _node(_require(obj, "inner", path), f"{path}.inner", ctx)
    outer = _node(_require(obj, "outer", path), f"{path}.outer", ctx)
    return Congruence(inner=inner, outer=outer, **common)


def _power(obj: Mapping[str, Any], path: str, ctx: _Context, common: dict[str, Any]) -> SequenceExpr:
    exponent = _rational(_require(obj, "exponent", path), f"{path}.exponent")
    operand = _node(_require(obj, "operand", path), f"{path}.operand", ctx)
    return FractionalPower(operand=operand, exponent=exponent, **common)


_NODE_PARSERS: dict[str, Callable[[Mapping[str, Any], str, _Context, dict[str, Any]], SequenceExpr]] = {
    "toeplitz": _toeplitz,
    "diag_sampling": _diag_sampling,
    "identity": _identity,
    "sum": _sum,
    "product": _product,
    "scale": _scale,
    "congruence": _congruence,
    "power": _power,
}


def _node(obj: Any, path: str, ctx: _Context, *, root: bool = False) -> SequenceExpr:
    spec = _mapping(obj, path)
    kind = _require(spec, "node", path)
    parser = _NODE_PARSERS.get(kind)
    if parser is None:
        raise ConfigError(f"{path}.node", f"unknown node '{kind}' (known: {', '.join(NODE_TYPES)})")
    declared = spec.get("hpd", root)
    if not isinstance(declared, bool):
        raise ConfigError(f"{path}.hpd", "expected true or false")
    common = {"declared_hpd": declared or root, "label": str(spec.get("label", ""))}
    try:
        node = parser(spec, path, ctx, common)
    except ConstructionError as err:
        raise ConfigError(path, str(err)) from err
    if (node.levels, node.block_size) != (ctx.levels, ctx.block_size):
        raise ConfigError(
            path,
            f"node has d={node.levels}, r={node.block_size} but the experiment has "
            f"d={ctx.levels}, r={ctx.block_size}",
        )
    return node


def _n_list(value: Any, path: str) -> tuple[int, ...]:
    items = tuple(_int(v, f"{path}[{i}]", minimum=2) for i, v in enumerate(_list(value, path)))
    if any(b <= a for a, b in zip(items, items[1:])):
        raise ConfigError(path, "entries must be strictly increasing")
    return items


def _grid(value: Any, path: str) -> tuple[int, int]:
    items = _list(value, path)
    if len(items) != 2:
        raise ConfigError(path, "expected [Mx, Mtheta]")
    return _int(items[0], f"{path}[0]"), _int(items[1], f"{path}[1]")


def _float(value: Any, path: str, minimum: float = 0.0) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)) or value < minimum:
        raise ConfigError(path, f"expected a number >= {minimum}, got {value!r}")
    return float(value)


def parse_experiment(obj: Any, path: str = "$") -> ExperimentSpec:
    """
    Build an experiment from its parsed JSON object.

    Raises:
        ConfigError: Naming the JSON path of the first schema violation
    """
    spec = _mapping(obj, path)
    experiment_id = _require(spec, "id", path)
    if not isinstance(experiment_id, str) or not experiment_id:
        raise ConfigError(f"{path}.id", "expected a non-empty string")
    ctx = _Context(
        levels=_int(spec.get("d", 1), f"{path}.d"),
        block_size=_int(spec.get("r", 1), f"{path}.r"),
    )
    a_expr = _node(_require(spec, "A", path), f"{path}.A", ctx, root=True)
    b_expr = _node(_require(spec, "B", path), f"{path}.B", ctx, root=True)

    expected_kind = spec.get("expected", "candidate")
    if expected_kind not in ("candidate", "zero"):
        raise ConfigError(f"{path}.expected", "expected 'candidate' or 'zero'")
    expected = zero_symbol(ctx.block_size, ctx.levels) if expected_kind == "zero" else None

    target = spec.get("target_zero_measure")
    return ExperimentSpec(
        id=experiment_id,
        description=str(spec.get("description", "")),
        a_expr=a_expr,
        b_expr=b_expr,
        expected=expected,
        n_list=_n_list(spec["n_list"], f"{path}.n_list") if "n_list" in spec else DEFAULT_N_LIST,
        threshold=_float(spec.get("threshold", ZERO_THRESHOLD), f"{path}.threshold"),
        grid=_grid(spec["grid"], f"{path}.grid") if "grid" in spec else DEFAULT_GRID,
        target_zero_measure=None if target is None else _float(target, f"{path}.target_zero_measure"),
    )


def load_config(path: Path) -> list[ExperimentSpec]:
    """
    Load the experiments of a JSON configuration file.

    Args:
        path: JSON file holding one experiment object or ``{"experiments": [...]}``

    Returns:
        Validated experiments in file order

    Raises:
        ConfigError: If the file cannot be read or violates the schema
    """
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except OSError as err:
        raise ConfigError(str(path), f"cannot read configuration: {err}") from err
    except json.JSONDecodeError as err:
        raise ConfigError(f"$ (line {err.lineno}, column {err.colno})", f"invalid JSON: {err.msg}") from err

    if isinstance(data, Mapping) and "experiments" in data:
        items = _list(data["experiments"], "$.experiments")
        specs = [parse_experiment(item, f"$.experiments[{i}]") for i, item in enumerate(items)]
    else:
        specs = [parse_experiment(data)]

    seen: set[str] = set()
    for i, spec in enumerate(specs):
        if spec.id in seen:
            raise ConfigError(f"$.experiments[{i}].id", f"duplicate experiment id '{spec.id}'")
        seen.add(spec.id)
    logger.info(f"loaded {len(specs)} experiment(s) from {path}")
    return specs
