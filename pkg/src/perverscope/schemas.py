"""Strict, versioned JSON schemas for every input kind the CLI accepts.

Unknown fields are rejected: exact mathematics deserves exact I/O.  Matrices
are arrays of arrays of strings "p/q"; every document carries a "schema" tag
and may carry a free-form "comment".
"""

from __future__ import annotations

import json
import os

from .complexes import CochainComplex
from .decomp import MapStratification
from .ratlin import RationalMatrix
from .sites import CellMap, CellSite, Flag
from .sheaves import CellSheaf, SheafComplex


class SchemaError(ValueError):
    pass


_ALLOWED = {
    "perverscope/site-v1": {"schema", "comment", "cells", "covers", "strata",
                            "strat_cdim", "compact", "affine"},
    "perverscope/sheaf-v1": {"schema", "comment", "stalk_dim", "restrictions"},
    "perverscope/sheafcomplex-v1": {"schema", "comment", "terms", "diffs"},
    "perverscope/complex-v1": {"schema", "comment", "dims", "diffs"},
    "perverscope/map-v1": {"schema", "comment", "source_site", "target_site", "mapping"},
    "perverscope/matrix-v1": {"schema", "comment", "matrix"},
    "perverscope/rep-v1": {"schema", "comment", "rank", "generators"},
    "perverscope/wang-v1": {"schema", "comment", "fiber_betti", "operators"},
    "perverscope/mapstrat-v1": {"schema", "comment", "dim_x", "strata", "generically_finite"},
    "perverscope/surface-v1": {"schema", "comment", "points"},
    "perverscope/flag-v1": {"schema", "comment", "steps"},
    "perverscope/table-v1": {"schema", "comment", "raw", "normalized", "normalization_shift"},
    "perverscope/shape-v1": {"schema", "comment", "summands"},
}


def load_document(path, expected_schema):
    try:
        with open(path) as fh:
            obj = json.load(fh)
    except FileNotFoundError:
        raise SchemaError(f"input file not found: {path}")
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: not valid JSON ({exc})")
    return check_document(obj, expected_schema, where=path)


def check_document(obj, expected_schema, where="<input>"):
    if not isinstance(obj, dict):
        raise SchemaError(f"{where}: expected a JSON object")
    tag = obj.get("schema")
    if tag != expected_schema:
        raise SchemaError(f"{where}: schema {tag!r} where {expected_schema!r} was expected")
    unknown = set(obj) - _ALLOWED[expected_schema]
    if unknown:
        raise SchemaError(f"{where}: unknown fields {sorted(unknown)}")
    return obj


def load_site(path) -> CellSite:
    obj = load_document(path, "perverscope/site-v1")
    try:
        return CellSite.from_json(obj, check=False)
    except Exception as exc:
        raise SchemaError(f"{path}: {exc}")


def load_matrix(path) -> RationalMatrix:
    obj = load_document(path, "perverscope/matrix-v1")
    try:
        return RationalMatrix.from_json(obj["matrix"])
    except Exception as exc:
        raise SchemaError(f"{path}: {exc}")


def sheaf_to_json(K: SheafComplex):
    if list(K.degrees()) == [0] and not K.diffs:
        s = K.term(0)
        return {
            "schema": "perverscope/sheaf-v1",
            "stalk_dim": {c: s.stalk_dim[c] for c in sorted(s.stalk_dim)},
            "restrictions": sorted(
                [[a, b, s.restriction(a, b).to_json()] for (a, b) in K.site.covers]
            ),
        }
    return {
        "schema": "perverscope/sheafcomplex-v1",
        "terms": {
            str(q): {
                "stalk_dim": {c: t.stalk_dim[c] for c in sorted(t.stalk_dim)},
                "restrictions": sorted(
                    [[a, b, t.restriction(a, b).to_json()] for (a, b) in K.site.covers]
                ),
            }
            for q, t in sorted(K.terms.items())
        },
        "diffs": {
            str(q): {c: m.to_json() for c, m in sorted(per.items())}
            for q, per in sorted(K.diffs.items())
        },
    }


def _sheaf_from_payload(site: CellSite, payload, where) -> CellSheaf:
    dims = {c: int(v) for c, v in payload["stalk_dim"].items()}
    unknown = set(dims) - set(site.cells)
    if unknown:
        raise SchemaError(f"{where}: stalk dims on unknown cells {sorted(unknown)}")
    restr = {}
    for a, b, rows in payload.get("restrictions", []):
        if (a, b) not in site.covers:
            raise SchemaError(f"{where}: restriction on non-cover pair ({a!r}, {b!r})")
        shape = (dims.get(b, 0), dims.get(a, 0))
        restr[(a, b)] = RationalMatrix.from_json(rows, expect_shape=shape) if rows else RationalMatrix.zeros(*shape)
    try:
        return CellSheaf(site, dims, restr)
    except Exception as exc:
        raise SchemaError(f"{where}: {exc}")


def load_sheaf(path, site: CellSite) -> SheafComplex:
    with open(path) as fh:
        obj = json.load(fh)
    tag = obj.get("schema")
    if tag == "perverscope/sheaf-v1":
        check_document(obj, tag, where=path)
        payload = {k: v for k, v in obj.items() if k in ("stalk_dim", "restrictions")}
        return SheafComplex.from_sheaf(_sheaf_from_payload(site, payload, path))
    if tag == "perverscope/sheafcomplex-v1":
        check_document(obj, tag, where=path)
        terms = {
            int(q): _sheaf_from_payload(site, payload, path)
            for q, payload in obj["terms"].items()
        }
        diffs = {}
        for q, per in obj.get("diffs", {}).items():
            q = int(q)
            diffs[q] = {}
            for c, rows in per.items():
                shape = (
                    terms.get(q + 1).stalk_dim.get(c, 0) if q + 1 in terms else 0,
                    terms[q].stalk_dim.get(c, 0),
                )
                diffs[q][c] = RationalMatrix.from_json(rows, expect_shape=shape)
        try:
            return SheafComplex(site, terms, diffs)
        except Exception as exc:
            raise SchemaError(f"{path}: {exc}")
    raise SchemaError(f"{path}: not a sheaf document (schema {tag!r})")


def load_map(path) -> CellMap:
    obj = load_document(path, "perverscope/map-v1")
    base = os.path.dirname(os.path.abspath(path))
    try:
        source = load_site(os.path.join(base, obj["source_site"]))
        target = load_site(os.path.join(base, obj["target_site"]))
        return CellMap(source, target, obj["mapping"])
    except SchemaError:
        raise
    except Exception as exc:
        raise SchemaError(f"{path}: {exc}")


def load_rep(path):
    from .localsys import MonodromyRep

    obj = load_document(path, "perverscope/rep-v1")
    try:
        gens = tuple(RationalMatrix.from_json(g) for g in obj["generators"])
        return MonodromyRep(int(obj["rank"]), gens)
    except Exception as exc:
        raise SchemaError(f"{path}: {exc}")


def load_wang_spec(path):
    obj = load_document(path, "perverscope/wang-v1")
    try:
        betti = [int(x) for x in obj["fiber_betti"]]
        ops = {int(q): RationalMatrix.from_json(rows) for q, rows in obj.get("operators", {}).items()}
        return betti, ops
    except SchemaError:
        raise
    except Exception as exc:
        raise SchemaError(f"{path}: {exc}")


def load_mapstrat(path) -> MapStratification:
    obj = load_document(path, "perverscope/mapstrat-v1")
    try:
        return MapStratification.from_json(obj)
    except Exception as exc:
        raise SchemaError(f"{path}: {exc}")


def load_surface_config(path):
    obj = load_document(path, "perverscope/surface-v1")
    try:
        return {
            rec["name"]: RationalMatrix.from_json(rec["intersection_matrix"])
            for rec in obj["points"]
        }
    except Exception as exc:
        raise SchemaError(f"{path}: {exc}")


def load_flag(path, site: CellSite) -> Flag:
    obj = load_document(path, "perverscope/flag-v1")
    try:
        return Flag.from_json(site, obj)
    except Exception as exc:
        raise SchemaError(f"{path}: {exc}")


def load_complex(path) -> CochainComplex:
    obj = load_document(path, "perverscope/complex-v1")
    try:
        return CochainComplex.from_json(obj)
    except Exception as exc:
        raise SchemaError(f"{path}: {exc}")


def load_table(path):
    from .pfiltr import FiltrationTable

    obj = load_document(path, "perverscope/table-v1")
    try:
        return FiltrationTable.from_json(obj)
    except Exception as exc:
        raise SchemaError(f"{path}: {exc}")
