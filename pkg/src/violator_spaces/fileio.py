"""File formats: JSON containers for tables and USOs, CSV for instances.

JSON kinds are sniffed by their top-level keys, CSV kinds by header:

  explicit  {"names": [...], "violators": {"<subset key>": [names...]}}
  abstract  {"names": [...], "values": {"<subset key>": token}, "order": [...]}
  concrete  {"points": [...], "constraints": [[point indices...], ...]}
  uso       {"blocks": [[names...], ...], "outmap": {"<vertex key>": [names...]}}

  points     CSV with header  name,x,y[,z...]   (name column optional)
  halfplanes CSV with header  name,a,b,c        (rows are a*x + b*y <= c)

Subset and vertex keys join member names with commas; the empty subset
keys as "".  Keys are accepted in any member order and emitted in
ground-set index order.  Numbers in CSV files are exact rationals:
integers, p/q, or decimal strings.
"""

from __future__ import annotations

import csv
import io
import json
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .core import ConstraintSet
from .explicit import (
    AbstractLpTable,
    ConcreteLpProblem,
    ExplicitViolatorSpace,
)
from .grid_uso import GridPartition, GridUso
from .instances import HalfplaneLp, PointSet


class ParseError(Exception):
    """Input file does not match any supported schema."""


Loaded = Tuple[str, object]


def _subset_key(mask: int, names: Sequence[str]) -> str:
    return ",".join(names[i] for i in range(len(names)) if (mask >> i) & 1)


def _parse_member_list(members, name_index: Dict[str, int], what: str) -> int:
    mask = 0
    for name in members:
        if name not in name_index:
            raise ParseError(f"{what}: unknown constraint name {name!r}")
        bit = 1 << name_index[name]
        if mask & bit:
            raise ParseError(f"{what}: duplicate name {name!r}")
        mask |= bit
    return mask


def _parse_key(key: str, name_index: Dict[str, int], what: str) -> int:
    if key == "":
        return 0
    return _parse_member_list(key.split(","), name_index, what)


def _load_names(doc: dict) -> List[str]:
    names = doc.get("names")
    if not isinstance(names, list) or not all(isinstance(x, str) for x in names):
        raise ParseError('"names" must be a list of strings')
    return names


# -- explicit violator spaces ----------------------------------------


def explicit_from_dict(doc: dict) -> ExplicitViolatorSpace:
    names = _load_names(doc)
    n = len(names)
    index = {name: i for i, name in enumerate(names)}
    if len(index) != n:
        raise ParseError("names must be unique")
    violators = doc.get("violators")
    if not isinstance(violators, dict):
        raise ParseError('"violators" must be an object')
    table = [None] * (1 << n)
    for key, val in violators.items():
        mask = _parse_key(key, index, f"subset key {key!r}")
        if table[mask] is not None:
            raise ParseError(f"subset key {key!r} repeats an earlier subset")
        if not isinstance(val, list):
            raise ParseError(f"violators of {key!r} must be a list of names")
        table[mask] = _parse_member_list(val, index, f"violators of {key!r}")
    missing = next((m for m, v in enumerate(table) if v is None), None)
    if missing is not None:
        raise ParseError(
            f"missing subset key {_subset_key(missing, names)!r}:"
            f" all {1 << n} subsets are required"
        )
    return ExplicitViolatorSpace(n, table, names=names)


def explicit_to_dict(space: ExplicitViolatorSpace) -> dict:
    names = space.names
    return {
        "names": list(names),
        "violators": {
            _subset_key(g, names): [
                names[i] for i in ConstraintSet(space.violator_mask(g), space.n)
            ]
            for g in range(1 << space.n)
        },
    }


# -- abstract value tables -------------------------------------------


def abstract_from_dict(doc: dict) -> AbstractLpTable:
    names = _load_names(doc)
    n = len(names)
    index = {name: i for i, name in enumerate(names)}
    values = doc.get("values")
    order = doc.get("order")
    if not isinstance(values, dict):
        raise ParseError('"values" must be an object')
    if not isinstance(order, list) or not all(isinstance(x, str) for x in order):
        raise ParseError('"order" must be a list of tokens')
    table: List[Optional[str]] = [None] * (1 << n)
    for key, tok in values.items():
        mask = _parse_key(key, index, f"subset key {key!r}")
        if table[mask] is not None:
            raise ParseError(f"subset key {key!r} repeats an earlier subset")
        if not isinstance(tok, str):
            raise ParseError(f"value of {key!r} must be a token string")
        table[mask] = tok
    missing = next((m for m, v in enumerate(table) if v is None), None)
    if missing is not None:
        raise ParseError(f"missing subset key {_subset_key(missing, names)!r}")
    try:
        return AbstractLpTable(n, table, order, names=names)
    except ValueError as exc:
        raise ParseError(str(exc)) from exc


def abstract_to_dict(table: AbstractLpTable) -> dict:
    names = table.names
    return {
        "names": list(names),
        "values": {
            _subset_key(g, names): table.values[g] for g in range(1 << table.n)
        },
        "order": list(table.order),
    }


# -- concrete problems -----------------------------------------------


def concrete_from_dict(doc: dict) -> ConcreteLpProblem:
    points = doc.get("points")
    constraints = doc.get("constraints")
    if not isinstance(points, list) or not all(isinstance(x, str) for x in points):
        raise ParseError('"points" must be a list of labels')
    if not isinstance(constraints, list):
        raise ParseError('"constraints" must be a list of index lists')
    for c in constraints:
        if not isinstance(c, list) or not all(
            isinstance(i, int) and 0 <= i < len(points) for i in c
        ):
            raise ParseError(f"constraint {c} must list point indices")
    names = doc.get("names")
    try:
        return ConcreteLpProblem(points, constraints, names=names)
    except ValueError as exc:
        raise ParseError(str(exc)) from exc


def concrete_to_dict(problem: ConcreteLpProblem) -> dict:
    return {
        "points": list(problem.points),
        "constraints": [list(c) for c in problem.constraints],
        "names": list(problem.names),
    }


# -- grid USOs --------------------------------------------------------


def uso_from_dict(doc: dict) -> Tuple[GridUso, List[str]]:
    blocks = doc.get("blocks")
    outmap_doc = doc.get("outmap")
    if not isinstance(blocks, list) or not all(isinstance(b, list) for b in blocks):
        raise ParseError('"blocks" must be a list of name lists')
    names = [str(x) for b in blocks for x in b]
    if len(set(names)) != len(names):
        raise ParseError("block entries must be unique")
    index = {name: i for i, name in enumerate(names)}
    sizes = [len(b) for b in blocks]
    if any(s == 0 for s in sizes):
        raise ParseError("every block must be nonempty")
    partition = GridPartition.uniform(sizes)
    if not isinstance(outmap_doc, dict):
        raise ParseError('"outmap" must be an object')
    block_of = partition.block_of
    outmap: Dict[Tuple[int, ...], int] = {}
    for key, dirs in outmap_doc.items():
        mask = _parse_key(key, index, f"vertex key {key!r}")
        members = sorted(ConstraintSet(mask, partition.n))
        if len(members) != partition.delta or len(
            {block_of[h] for h in members}
        ) != partition.delta:
            raise ParseError(f"vertex key {key!r} must pick one name per block")
        J = tuple(sorted(members, key=lambda h: block_of[h]))
        if not isinstance(dirs, list):
            raise ParseError(f"outmap of {key!r} must be a list of names")
        outmap[J] = _parse_member_list(dirs, index, f"outmap of {key!r}")
    try:
        return GridUso(partition, outmap), names
    except ValueError as exc:
        # structural problems are parse errors; edge-consistency failures
        # propagate as validation witnesses
        raise ParseError(str(exc)) from exc


def uso_to_dict(u: GridUso, names: Optional[Sequence[str]] = None) -> dict:
    if names is None:
        names = [str(i + 1) for i in range(u.n)]
    return {
        "blocks": [[names[h] for h in b] for b in u.partition.blocks],
        "outmap": {
            ",".join(names[h] for h in sorted(J)): [names[d] for d in sorted(u.s(J))]
            for J in u.partition.vertices()
        },
    }


# -- CSV instances ----------------------------------------------------


def _parse_fraction(text: str, where: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise ParseError(f"{where}: bad rational {text!r}") from exc


def _read_csv(text: str) -> Tuple[List[str], List[List[str]]]:
    rows = [row for row in csv.reader(io.StringIO(text)) if row and any(row)]
    if not rows:
        raise ParseError("empty CSV file")
    header = [c.strip() for c in rows[0]]
    return header, [[c.strip() for c in row] for row in rows[1:]]


def points_from_csv(text: str) -> Tuple[PointSet, List[str]]:
    header, rows = _read_csv(text)
    has_name = header and header[0] == "name"
    coord_cols = header[1:] if has_name else header
    if not coord_cols:
        raise ParseError("point CSV needs coordinate columns")
    names = []
    coords = []
    for lineno, row in enumerate(rows, start=2):
        if len(row) != len(header):
            raise ParseError(f"line {lineno}: expected {len(header)} fields")
        if has_name:
            names.append(row[0])
            vals = row[1:]
        else:
            names.append(f"p{lineno - 2}")
            vals = row
        coords.append([_parse_fraction(v, f"line {lineno}") for v in vals])
    if not coords:
        raise ParseError("point CSV has no data rows")
    return PointSet.from_rows(coords), names


def halfplanes_from_csv(text: str) -> Tuple[HalfplaneLp, List[str]]:
    header, rows = _read_csv(text)
    has_name = header and header[0] == "name"
    cols = header[1:] if has_name else header
    if cols != ["a", "b", "c"]:
        raise ParseError('halfplane CSV needs header "a,b,c" (optional "name" first)')
    names = []
    triples = []
    for lineno, row in enumerate(rows, start=2):
        if len(row) != len(header):
            raise ParseError(f"line {lineno}: expected {len(header)} fields")
        if has_name:
            names.append(row[0])
            vals = row[1:]
        else:
            names.append(f"h{lineno - 2}")
            vals = row
        triples.append([_parse_fraction(v, f"line {lineno}") for v in vals])
    if not triples:
        raise ParseError("halfplane CSV has no data rows")
    try:
        return HalfplaneLp.from_rows(triples), names
    except ValueError as exc:
        raise ParseError(str(exc)) from exc


# -- sniffing loader --------------------------------------------------


def load_text(text: str, filename: str = "<input>") -> Loaded:
    """Parse a JSON or CSV document into its tagged object."""
    stripped = text.lstrip()
    if stripped.startswith("{"):
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParseError(
                f"{filename}: invalid JSON at line {exc.lineno}, column {exc.colno}"
            ) from exc
        if not isinstance(doc, dict):
            raise ParseError(f"{filename}: top level must be an object")
        keys = set(doc)
        if "violators" in keys:
            return "explicit", explicit_from_dict(doc)
        if "values" in keys and "order" in keys:
            return "abstract", abstract_from_dict(doc)
        if "points" in keys and "constraints" in keys:
            return "concrete", concrete_from_dict(doc)
        if "blocks" in keys and "outmap" in keys:
            return "uso", uso_from_dict(doc)
        raise ParseError(f"{filename}: unrecognized JSON keys {sorted(keys)}")
    header = stripped.splitlines()[0] if stripped else ""
    fields = [c.strip() for c in header.split(",")]
    if fields == ["a", "b", "c"] or fields == ["name", "a", "b", "c"]:
        return "halfplanes", halfplanes_from_csv(text)
    if fields and (fields[0] == "name" or all(f and f not in ("a", "b", "c") for f in fields)):
        return "points", points_from_csv(text)
    raise ParseError(f"{filename}: cannot determine file kind from header {header!r}")


def load_path(path: str) -> Loaded:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ParseError(f"{path}: {exc.strerror}") from exc
    return load_text(text, filename=path)
