"""Groupoid and arrow-function definition files (JSON documents).

A groupoid file has fields ``units`` (count), ``arrows`` (list of
{id, r, s, inv}), ``compose`` (list of [x, y, xy] triples; omitted pairs are
undefined) and ``weights`` (list of {unit, w}).  Constructors also emit
``unit_arrows`` explicitly; when absent, identities are derived from the
composition behavior.  A function file maps arrow ids to [re, im] pairs.
"""

from __future__ import annotations

import json

import numpy as np

from .groupoid import UNDEFINED, FiniteGroupoid


class FileFormatError(ValueError):
    pass


def groupoid_to_dict(g: FiniteGroupoid) -> dict:
    return {
        "units": g.n_units,
        "unit_arrows": [int(e) for e in g.unit_arrows],
        "arrows": [
            {"id": x, "r": int(g.range_of[x]), "s": int(g.source_of[x]),
             "inv": int(g.inverse_of[x])}
            for x in range(g.n_arrows)
        ],
        "compose": [
            [x, y, int(g.compose_table[x, y])]
            for x in range(g.n_arrows)
            for y in range(g.n_arrows)
            if g.compose_table[x, y] != UNDEFINED
        ],
        "weights": [
            {"unit": u, "w": float(g.weights[g.unit_arrows[u]])} for u in range(g.n_units)
        ],
    }


def groupoid_from_dict(data: dict) -> FiniteGroupoid:
    try:
        n_units = int(data["units"])
        arrows = data["arrows"]
    except (KeyError, TypeError, ValueError) as err:
        raise FileFormatError(f"missing or malformed required field: {err}") from err
    n = len(arrows)
    if n == 0 or n_units <= 0:
        raise FileFormatError("need at least one arrow and one unit")
    rng = np.full(n, -1, dtype=int)
    src = np.full(n, -1, dtype=int)
    inv = np.full(n, -1, dtype=int)
    seen = set()
    for entry in arrows:
        try:
            x = int(entry["id"])
            r, s, iv = int(entry["r"]), int(entry["s"]), int(entry["inv"])
        except (KeyError, TypeError, ValueError) as err:
            raise FileFormatError(f"malformed arrow entry {entry!r}") from err
        if not 0 <= x < n or x in seen:
            raise FileFormatError(f"arrow ids must be dense and unique; got {x}")
        seen.add(x)
        if not (0 <= r < n_units and 0 <= s < n_units and 0 <= iv < n):
            raise FileFormatError(f"arrow {x} references out-of-range data")
        rng[x], src[x], inv[x] = r, s, iv
    compose = np.full((n, n), UNDEFINED, dtype=int)
    for triple in data.get("compose", []):
        if len(triple) != 3:
            raise FileFormatError(f"composition entries are [x, y, xy]; got {triple!r}")
        x, y, xy = (int(v) for v in triple)
        if not (0 <= x < n and 0 <= y < n and 0 <= xy < n):
            raise FileFormatError(f"composition entry {triple!r} out of range")
        if compose[x, y] != UNDEFINED and compose[x, y] != xy:
            raise FileFormatError(f"conflicting compositions declared for ({x}, {y})")
        compose[x, y] = xy
    unit_weights = np.ones(n_units)
    seen_units = set()
    for entry in data.get("weights", []):
        try:
            u, w = int(entry["unit"]), float(entry["w"])
        except (KeyError, TypeError, ValueError) as err:
            raise FileFormatError(f"malformed weight entry {entry!r}") from err
        if not 0 <= u < n_units or u in seen_units:
            raise FileFormatError(f"weights must name each unit at most once; got {u}")
        seen_units.add(u)
        if w <= 0:
            raise FileFormatError(f"weight of unit {u} must be positive")
        unit_weights[u] = w
    if "unit_arrows" in data:
        units = [int(e) for e in data["unit_arrows"]]
        if len(units) != n_units or any(not 0 <= e < n for e in units):
            raise FileFormatError("unit_arrows must list one arrow id per unit")
    else:
        units = _derive_unit_arrows(n_units, rng, src, inv, compose)
    unit_arrows = np.array(units, dtype=int)
    return FiniteGroupoid(
        range_of=rng,
        source_of=src,
        inverse_of=inv,
        compose_table=compose,
        unit_arrows=unit_arrows,
        weights=unit_weights[src],
    )


def _derive_unit_arrows(n_units, rng, src, inv, compose) -> list[int]:
    n = rng.shape[0]
    units = []
    for u in range(n_units):
        candidates = []
        for e in range(n):
            if rng[e] != u or src[e] != u or inv[e] != e or compose[e, e] != e:
                continue
            two_sided = all(
                compose[x, e] in (UNDEFINED, x) for x in range(n)
            ) and all(compose[e, y] in (UNDEFINED, y) for y in range(n))
            if two_sided:
                candidates.append(e)
        if len(candidates) != 1:
            raise FileFormatError(
                f"cannot derive the unit arrow of unit {u}: "
                f"{len(candidates)} candidates (add an explicit unit_arrows field)"
            )
        units.append(candidates[0])
    return units


def write_groupoid(path: str, g: FiniteGroupoid) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(groupoid_to_dict(g), fh, indent=1)
        fh.write("\n")


def read_groupoid(path: str) -> FiniteGroupoid:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as err:
        raise FileFormatError(f"cannot read groupoid file {path}: {err}") from err
    return groupoid_from_dict(data)


def arrow_function_to_dict(f) -> dict:
    f = np.asarray(f, dtype=complex)
    return {
        "arrows": int(f.shape[0]),
        "values": {str(x): [float(f[x].real), float(f[x].imag)] for x in range(f.shape[0])},
    }


def arrow_function_from_dict(data: dict, g: FiniteGroupoid) -> np.ndarray:
    values = data.get("values")
    if not isinstance(values, dict):
        raise FileFormatError("function file needs a 'values' mapping of id -> [re, im]")
    declared = data.get("arrows")
    if declared is not None and int(declared) != g.n_arrows:
        raise FileFormatError(
            f"function is defined on {declared} arrows, groupoid has {g.n_arrows}"
        )
    f = np.zeros(g.n_arrows, dtype=complex)
    for key, pair in values.items():
        try:
            x = int(key)
            re, im = float(pair[0]), float(pair[1])
        except (TypeError, ValueError, IndexError) as err:
            raise FileFormatError(f"malformed value entry {key!r}: {pair!r}") from err
        if not 0 <= x < g.n_arrows:
            raise FileFormatError(f"value for unknown arrow id {x}")
        f[x] = re + 1j * im
    return f


def write_arrow_function(path: str, f) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(arrow_function_to_dict(f), fh, indent=1)
        fh.write("\n")


def read_arrow_function(path: str, g: FiniteGroupoid) -> np.ndarray:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as err:
        raise FileFormatError(f"cannot read function file {path}: {err}") from err
    return arrow_function_from_dict(data, g)
