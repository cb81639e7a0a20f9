"""Command-line front end.

Subcommands: site, sheaf, ic, perverse, localsys, dt, polytope, hilb,
filtration, run.  Global flags --format (json | tsv), --out, --jobs.  Exit
codes: 0 success, 2 schema violation, 3 mathematical invariant violation,
4 internal error.  Output is deterministic: identical inputs give identical
bytes.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field

from .complexes import GradedDims
from . import decomp, lefcomb, localsys, perversity, pfiltr
from .hilbpart import SurfaceBetti, euler_product_coeffs, gottsche, partitions
from .ratlin import RationalMatrix
from .schemas import (
    SchemaError,
    load_flag,
    load_map,
    load_mapstrat,
    load_matrix,
    load_rep,
    load_sheaf,
    load_site,
    load_surface_config,
    load_wang_spec,
    sheaf_to_json,
)
from .sheaves import SheafError, compact_cohomology, global_cohomology, pushforward, sections_complex
from .sites import SiteError

EXIT_OK = 0
EXIT_SCHEMA = 2
EXIT_INVARIANT = 3
EXIT_INTERNAL = 4


class InvariantFailure(Exception):
    def __init__(self, message, payload=None):
        super().__init__(message)
        self.payload = payload or {}


@dataclass
class RunManifest:
    command: list
    inputs: list = field(default_factory=list)
    options: dict = field(default_factory=dict)
    out: str = None
    format: str = "json"


def _emit(report: dict, manifest: RunManifest):
    if manifest.format == "tsv":
        lines = []
        for key, value in sorted(report.items()):
            lines.append(f"{key}\t{json.dumps(value, sort_keys=True)}")
        text = "\n".join(lines) + "\n"
    else:
        text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    if manifest.out:
        with open(manifest.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _graded(gd: GradedDims):
    return {str(k): v for k, v in gd.items()}


# ---------------------------------------------------------------------------
# subcommand handlers (each returns a report dict or raises)
# ---------------------------------------------------------------------------


def cmd_site_check(args):
    site = load_site(args.site)
    problems = site.verify()
    report = {"command": "site check", "input": args.site, "violations": problems}
    if problems:
        raise InvariantFailure("site invariants violated", report)
    return report


def cmd_sheaf_cohomology(args):
    site = load_site(args.site)
    if site.verify():
        raise InvariantFailure("site invariants violated", {"violations": site.verify()})
    K = load_sheaf(args.sheaf, site)
    if args.compact_support:
        h = sections_complex(K).cohomology()
        kind = "compactly_supported"
    else:
        h = global_cohomology(K)
        kind = "ordinary"
    return {"command": "sheaf cohomology", "kind": kind, "cohomology": _graded(h)}


def cmd_sheaf_pushforward(args):
    f = load_map(args.map)
    K = load_sheaf(args.sheaf, f.source)
    T = pushforward(K, f)
    hx, hy = global_cohomology(K), global_cohomology(T)
    if hx != hy:
        raise InvariantFailure(
            "direct image failed the total-cohomology identity",
            {"source": _graded(hx), "target": _graded(hy)},
        )
    return {
        "command": "sheaf pushforward",
        "cohomology": _graded(hy),
        "stalks": {c: _graded(GradedDims(dict(T.stalk_complex(c).cohomology().items())))
                   for c in T.site.cells},
    }


def cmd_ic_build(args):
    site = load_site(args.site)
    open_strata = [n for n in site.strata if site.is_up_closed(site.strata[n])]
    if args.local_system == "constant":
        from .sheaves import CellSheaf

        dense = max(open_strata, key=lambda n: site.strat_cdim[n])
        sub = site.subsite(site.strata[dense])
        L = CellSheaf.constant(sub, args.rank)
    else:
        dense = max(open_strata, key=lambda n: site.strat_cdim[n])
        sub = site.subsite(site.strata[dense])
        L = load_sheaf(args.local_system, sub).term(0)
    ic = perversity.deligne_ic(site, L)
    stalks = {c: _graded(ic.stalk_complex(c).cohomology()) for c in site.cells}
    sheaves = {}
    for c, table in stalks.items():
        for q, dim in table.items():
            sheaves.setdefault(q, {})[c] = dim
    return {
        "command": "ic build",
        "cohomology_sheaves": {q: dict(sorted(v.items())) for q, v in sorted(sheaves.items())},
        "passes_ic_bounds": perversity.passes_ic_bounds(ic, site, shift=site.top_cdim()),
    }


def cmd_perverse_check(args):
    site = load_site(args.site)
    K = load_sheaf(args.complex, site)
    sup = perversity.check_support(K, site, shift=args.shift, ic_bounds=args.strengthened)
    cos = perversity.check_cosupport(K, site, shift=args.shift, ic_bounds=args.strengthened)
    report = {
        "command": "perverse check",
        "shift": args.shift,
        "support": sup.to_json(),
        "cosupport": cos.to_json(),
        "perverse": sup.ok and cos.ok,
    }
    if not (sup.ok and cos.ok):
        raise InvariantFailure("perversity conditions fail", report)
    return report


def cmd_localsys_circle(args):
    T = load_matrix(args.matrix)
    h0, h1 = localsys.circle_cohomology(T)
    return {"command": "localsys circle", "h0": h0, "h1": h1}


def cmd_localsys_wang(args):
    betti, ops = load_wang_spec(args.spec)
    total = localsys.wang(betti, ops)
    return {"command": "localsys wang", "total_space_betti": _graded(total)}


def cmd_localsys_push(args):
    rep = load_rep(args.rep)
    pushed = localsys.cyclic_pushforward(args.n, rep)
    pieces = localsys.isotypic_decomposition(pushed)
    return {
        "command": "localsys push",
        "rank": pushed.rank,
        "isotypic": [
            {"simple_rank": p.simple_rank, "multiplicity": p.multiplicity,
             "endo_dim": p.endo_dim_of_simple}
            for p in pieces
        ],
    }


def cmd_dt_semismall(args):
    ms = load_mapstrat(args.record)
    semismall = decomp.is_semismall(ms)
    report = {
        "command": "dt semismall",
        "semismall": semismall,
        "small": decomp.is_small(ms),
        "defect": decomp.defect(ms),
    }
    if not semismall:
        raise InvariantFailure("not semismall", report)
    shape = decomp.dt_semismall(ms)
    report["relevant_strata"] = [s.name for s in decomp.relevant_strata(ms)]
    report["shape"] = shape.to_json()
    report["palindromic"] = decomp.palindromic_check(shape)
    return report


def cmd_dt_endo(args):
    ms = load_mapstrat(args.record)
    if not decomp.is_semismall(ms):
        raise InvariantFailure("not semismall", {"record": args.record})
    shape = decomp.dt_semismall(ms)
    dim, profile, components = decomp.endo_dimension(shape, ms)
    return {
        "command": "dt endo",
        "endo_dimension": dim,
        "multiplicity_profile": profile,
        "fiber_product_components": components,
    }


def cmd_dt_surface(args):
    config = load_surface_config(args.config)
    try:
        shape, rep = decomp.surface_resolution_dt(config)
    except decomp.StratificationError as exc:
        raise InvariantFailure(str(exc), {"config": args.config})
    return {"command": "dt surface", "shape": shape.to_json(), "report": rep.to_json()}


def cmd_dt_hilb(args):
    ms = decomp.hilbert_chow_strat(args.n)
    shape = decomp.dt_semismall(ms)
    return {
        "command": "dt hilb",
        "n": args.n,
        "strata": [s.name for s in ms.strata],
        "semismall": decomp.is_semismall(ms),
        "all_relevant": len(decomp.relevant_strata(ms)) == len(ms.strata),
        "shape": shape.to_json(),
    }


def cmd_polytope_hvector(args):
    f = tuple(int(x) for x in args.f.split(","))
    h = lefcomb.f_to_h(f, args.d)
    report = lefcomb.mcmullen_check(h)
    return {
        "command": "polytope hvector",
        "f_vector": list(f),
        "h_vector": list(h.entries),
        "toric_betti": _graded(lefcomb.toric_betti(h)),
        "mcmullen": report.to_json(),
    }


def cmd_polytope_mcmullen(args):
    entries = tuple(int(x) for x in args.h.split(","))
    h = lefcomb.HVector(len(entries) - 1, entries)
    report = lefcomb.mcmullen_check(h)
    out = {"command": "polytope mcmullen", "h_vector": list(entries), **report.to_json()}
    if not report.ok:
        raise InvariantFailure("not a valid simplicial-polytope h-vector", out)
    return out


def cmd_hilb_gottsche(args):
    betti = tuple(int(x) for x in args.betti.split(","))
    g = gottsche(SurfaceBetti(betti), args.n)
    return {
        "command": "hilb gottsche",
        "n": args.n,
        "betti": _graded(g),
        "total": g.total(),
    }


def cmd_hilb_euler(args):
    coeffs = euler_product_coeffs(args.N)
    return {
        "command": "hilb euler",
        "coefficients": coeffs,
        "partition_counts_agree": coeffs == [len(partitions(n)) for n in range(args.N + 1)],
    }


def cmd_filtration_flags(args):
    site = load_site(args.site)
    K = load_sheaf(args.complex, site)
    flag = load_flag(args.flag, site)
    table = pfiltr.flag_kernel_filtration(K, flag, site)
    return {"command": "filtration flags", "table": table.to_json()}


def cmd_filtration_compare(args):
    from .schemas import load_table

    a = load_table(args.first)
    b = load_table(args.second)
    na, _ = a.normalize()
    nb, _ = b.normalize()
    cells = na.difference_cells(nb)
    return {
        "command": "filtration compare",
        "equal": not cells,
        "first_normalized": na.to_json()["raw"],
        "second_normalized": nb.to_json()["raw"],
        "difference_cells": [list(c) for c in cells],
    }


def cmd_run(args):
    with open(args.manifest) as fh:
        spec = json.load(fh)
    manifests = spec if isinstance(spec, list) else [spec]
    results = []
    for entry in manifests:
        argv = list(entry["command"])
        for key, value in entry.get("options", {}).items():
            argv.extend([key, str(value)])
        argv.extend(entry.get("inputs", []))
        if entry.get("out"):
            argv.extend(["--out", entry["out"]])
        if entry.get("format"):
            argv.extend(["--format", entry["format"]])
        results.append(main(argv))
    code = max(results) if results else EXIT_OK
    return code


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="perverscope")
    p.add_argument("--format", choices=["json", "tsv"], default="json")
    p.add_argument("--out", default=None)
    p.add_argument("--jobs", type=int, default=1, help="batch manifests only")
    sub = p.add_subparsers(dest="group", required=True)

    site = sub.add_parser("site").add_subparsers(dest="action", required=True)
    sc = site.add_parser("check")
    sc.add_argument("site")
    sc.set_defaults(handler=cmd_site_check)

    sheaf = sub.add_parser("sheaf").add_subparsers(dest="action", required=True)
    sco = sheaf.add_parser("cohomology")
    sco.add_argument("site")
    sco.add_argument("sheaf")
    sco.add_argument("--compact-support", action="store_true")
    sco.set_defaults(handler=cmd_sheaf_cohomology)
    spf = sheaf.add_parser("pushforward")
    spf.add_argument("map")
    spf.add_argument("sheaf")
    spf.set_defaults(handler=cmd_sheaf_pushforward)

    ic = sub.add_parser("ic").add_subparsers(dest="action", required=True)
    icb = ic.add_parser("build")
    icb.add_argument("site")
    icb.add_argument("local_system", help="'constant' or a sheaf file on the open stratum")
    icb.add_argument("--rank", type=int, default=1)
    icb.set_defaults(handler=cmd_ic_build)

    perv = sub.add_parser("perverse").add_subparsers(dest="action", required=True)
    pc = perv.add_parser("check")
    pc.add_argument("site")
    pc.add_argument("complex")
    pc.add_argument("--shift", type=int, default=0)
    pc.add_argument("--strengthened", action="store_true")
    pc.set_defaults(handler=cmd_perverse_check)

    ls = sub.add_parser("localsys").add_subparsers(dest="action", required=True)
    lc = ls.add_parser("circle")
    lc.add_argument("--matrix", required=True)
    lc.set_defaults(handler=cmd_localsys_circle)
    lw = ls.add_parser("wang")
    lw.add_argument("spec")
    lw.set_defaults(handler=cmd_localsys_wang)
    lp = ls.add_parser("push")
    lp.add_argument("--n", type=int, required=True)
    lp.add_argument("--rep", required=True)
    lp.set_defaults(handler=cmd_localsys_push)

    dt = sub.add_parser("dt").add_subparsers(dest="action", required=True)
    ds = dt.add_parser("semismall")
    ds.add_argument("record")
    ds.set_defaults(handler=cmd_dt_semismall)
    de = dt.add_parser("endo")
    de.add_argument("record")
    de.set_defaults(handler=cmd_dt_endo)
    dsur = dt.add_parser("surface")
    dsur.add_argument("config")
    dsur.set_defaults(handler=cmd_dt_surface)
    dh = dt.add_parser("hilb")
    dh.add_argument("--n", type=int, required=True)
    dh.set_defaults(handler=cmd_dt_hilb)

    poly = sub.add_parser("polytope").add_subparsers(dest="action", required=True)
    ph = poly.add_parser("hvector")
    ph.add_argument("--f", required=True)
    ph.add_argument("--d", type=int, required=True)
    ph.set_defaults(handler=cmd_polytope_hvector)
    pm = poly.add_parser("mcmullen")
    pm.add_argument("--h", required=True)
    pm.set_defaults(handler=cmd_polytope_mcmullen)

    hb = sub.add_parser("hilb").add_subparsers(dest="action", required=True)
    hg = hb.add_parser("gottsche")
    hg.add_argument("--betti", required=True)
    hg.add_argument("--n", type=int, required=True)
    hg.set_defaults(handler=cmd_hilb_gottsche)
    he = hb.add_parser("euler")
    he.add_argument("--N", type=int, required=True)
    he.set_defaults(handler=cmd_hilb_euler)

    filt = sub.add_parser("filtration").add_subparsers(dest="action", required=True)
    ff = filt.add_parser("flags")
    ff.add_argument("site")
    ff.add_argument("complex")
    ff.add_argument("flag")
    ff.set_defaults(handler=cmd_filtration_flags)
    fc = filt.add_parser("compare")
    fc.add_argument("first")
    fc.add_argument("second")
    fc.set_defaults(handler=cmd_filtration_compare)

    run = sub.add_parser("run")
    run.add_argument("manifest")
    run.set_defaults(handler=None, is_run=True)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_SCHEMA if exc.code else EXIT_OK
    manifest = RunManifest(command=argv or sys.argv[1:], out=args.out, format=args.format)
    if getattr(args, "is_run", False):
        try:
            return cmd_run(args)
        except SchemaError as exc:
            _emit({"error": str(exc), "kind": "schema"}, manifest)
            return EXIT_SCHEMA
        except Exception as exc:  # manifest-level failure
            _emit({"error": str(exc), "kind": "internal"}, manifest)
            return EXIT_INTERNAL
    try:
        report = args.handler(args)
    except SchemaError as exc:
        _emit({"error": str(exc), "kind": "schema"}, manifest)
        return EXIT_SCHEMA
    except InvariantFailure as exc:
        payload = dict(exc.payload)
        payload.update({"error": str(exc), "kind": "invariant"})
        _emit(payload, manifest)
        return EXIT_INVARIANT
    except (SiteError, SheafError, ValueError) as exc:
        _emit({"error": str(exc), "kind": "invariant"}, manifest)
        return EXIT_INVARIANT
    except Exception as exc:
        _emit({"error": str(exc), "kind": "internal"}, manifest)
        return EXIT_INTERNAL
    _emit(report, manifest)
    return EXIT_OK


if __name__ == "__main__":
    raise SystemExit(main())
