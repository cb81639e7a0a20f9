"""Finite stratified cell sites: face posets with dimensions and incidence signs.

A site is the combinatorial stand-in for a stratified space.  Open means
up-closed in the face partial order, closed means down-closed.  Each stratum
carries a declared complex dimension, deliberately decoupled from the cell
dimensions of the model: a 1-real-dimensional circle site may model a complex
curve of complex dimension one.
"""

from __future__ import annotations

from itertools import combinations


class SiteError(ValueError):
    pass


class CellSite:
    def __init__(self, dims, covers, strata=None, strat_cdim=None,
                 compact=False, affine=False, comment="", check=True):
        """dims: cell -> cell dimension.  covers: (face, cell) -> sign (+1/-1).

        strata: name -> iterable of cells (a partition when provided).
        strat_cdim: name -> declared complex dimension.
        compact: declares that the site is a closure-complete model, so the
        incidence cochain complex legitimately computes compactly supported
        cohomology of the modeled space (for honestly compact models this is
        ordinary cohomology).
        affine: declares that the modeled space is affine.
        """
        self.dims = dict(dims)
        self.cells = tuple(sorted(self.dims))
        self.covers = {(a, b): int(s) for (a, b), s in covers.items()}
        if strata is None:
            strata = {"all": list(self.cells)}
            strat_cdim = strat_cdim or {"all": max(self.dims.values(), default=0)}
        self.strata = {name: frozenset(cs) for name, cs in strata.items()}
        self.strat_cdim = {name: int(d) for name, d in (strat_cdim or {}).items()}
        self.compact = bool(compact)
        self.affine = bool(affine)
        self.comment = comment
        self._up = None
        self._down = None
        self._chains_cache = {}
        if check:
            problems = self.verify()
            if problems:
                raise SiteError("; ".join(problems))

    # -- order structure -------------------------------------------------

    def _build_order(self):
        up = {c: {c} for c in self.cells}
        children = {c: [] for c in self.cells}
        for (a, b) in self.covers:
            children[a].append(b)
        for c in sorted(self.cells, key=lambda x: -self.dims[x]):
            for b in children[c]:
                up[c] |= up[b]
        self._up = {c: frozenset(s) for c, s in up.items()}
        down = {c: {c} for c in self.cells}
        for c in self.cells:
            for t in self._up[c]:
                down[t] = down.get(t, set())
                down[t].add(c)
        self._down = {c: frozenset(s) for c, s in down.items()}

    def up_set(self, cell) -> frozenset:
        if self._up is None:
            self._build_order()
        return self._up[cell]

    def down_set(self, cell) -> frozenset:
        if self._down is None:
            self._build_order()
        return self._down[cell]

    def leq(self, a, b) -> bool:
        return b in self.up_set(a)

    def cover_faces(self, cell):
        if not hasattr(self, "_faces") or self._faces is None:
            faces = {c: [] for c in self.cells}
            for (a, b) in sorted(self.covers):
                faces[b].append(a)
            self._faces = faces
        return self._faces[cell]

    def cover_sign(self, a, b):
        return self.covers[(a, b)]

    def closure(self, cells) -> frozenset:
        out = set()
        for c in cells:
            out |= self.down_set(c)
        return frozenset(out)

    def star(self, cells) -> frozenset:
        out = set()
        for c in cells:
            out |= self.up_set(c)
        return frozenset(out)

    def is_up_closed(self, cells) -> bool:
        s = set(cells)
        return all(self.up_set(c) <= s for c in s)

    def is_down_closed(self, cells) -> bool:
        s = set(cells)
        return all(self.down_set(c) <= s for c in s)

    def stratum_of(self, cell) -> str:
        for name, cs in self.strata.items():
            if cell in cs:
                return name
        raise SiteError(f"cell {cell!r} not covered by any stratum")

    def cdim_of_cell(self, cell) -> int:
        return self.strat_cdim[self.stratum_of(cell)]

    def top_cdim(self) -> int:
        return max(self.strat_cdim.values())

    # -- operations --------------------------------------------------------

    def open_star(self, cell) -> frozenset:
        if cell not in self.dims:
            raise SiteError(f"unknown cell {cell!r}")
        return self.up_set(cell)

    def closed_complement(self, open_cells) -> frozenset:
        if not self.is_up_closed(open_cells):
            raise SiteError("complement requested of a non-open (not up-closed) subset")
        rest = frozenset(self.cells) - frozenset(open_cells)
        assert self.is_down_closed(rest)
        return rest

    def subsite(self, cells, compact=None, affine=None) -> "CellSite":
        cells = frozenset(cells)
        unknown = cells - set(self.cells)
        if unknown:
            raise SiteError(f"unknown cells {sorted(unknown)}")
        dims = {c: self.dims[c] for c in cells}
        covers = {(a, b): s for (a, b), s in self.covers.items() if a in cells and b in cells}
        strata = {}
        cdim = {}
        for name, cs in self.strata.items():
            inter = cs & cells
            if inter:
                strata[name] = inter
                cdim[name] = self.strat_cdim.get(name, 0)
        return CellSite(
            dims, covers, strata, cdim,
            compact=self.compact if compact is None else compact,
            affine=self.affine if affine is None else affine,
            check=False,
        )

    def skeleton_flag(self) -> "Flag":
        top = max(self.dims.values(), default=0)
        steps = []
        for k in range(0, top + 2):
            cells = frozenset(c for c in self.cells if self.dims[c] <= top - k)
            steps.append(cells)
            if not cells:
                break
        return Flag(self, steps)

    def product(self, other: "CellSite", compact=None) -> "CellSite":
        """Product site; second-factor cover signs are twisted by (-1)^dim."""
        dims = {}
        for a in self.cells:
            for b in other.cells:
                dims[(a, b)] = self.dims[a] + other.dims[b]
        covers = {}
        for (a1, a2), s in self.covers.items():
            for b in other.cells:
                covers[((a1, b), (a2, b))] = s
        for (b1, b2), s in other.covers.items():
            for a in self.cells:
                covers[((a, b1), (a, b2))] = s * (-1) ** self.dims[a]
        name_dims = {f"{a}*{b}": d for (a, b), d in dims.items()}
        name_covers = {(f"{x[0]}*{x[1]}", f"{y[0]}*{y[1]}"): s for (x, y), s in covers.items()}
        return CellSite(
            name_dims, name_covers,
            compact=(self.compact and other.compact) if compact is None else compact,
        )

    # -- verification --------------------------------------------------------

    def verify(self) -> list[str]:
        """All invariant checks; returns a list of violations (empty iff valid)."""
        problems = []
        for (a, b) in self.covers:
            if a not in self.dims or b not in self.dims:
                problems.append(f"cover ({a!r}, {b!r}) references unknown cell")
            elif self.dims[b] != self.dims[a] + 1:
                problems.append(f"cover ({a!r}, {b!r}) does not raise dimension by exactly 1")
        if any(s not in (1, -1) for s in self.covers.values()):
            problems.append("cover signs must be +1 or -1")
        if any(d < 0 for d in self.dims.values()):
            problems.append("negative cell dimension")
        if problems:
            return problems

        # diamond condition: signs along any two-step gap cancel
        children = {c: [] for c in self.cells}
        for (a, b) in self.covers:
            children[a].append(b)
        for a in self.cells:
            grand = {}
            for m in children[a]:
                for b in children[m]:
                    grand.setdefault(b, 0)
                    grand[b] += self.covers[(a, m)] * self.covers[(m, b)]
            for b, total in grand.items():
                if total != 0:
                    problems.append(f"sign condition fails between {a!r} and {b!r} (sum {total})")

        # strata partition and local closedness
        seen = set()
        for name, cs in self.strata.items():
            if cs & seen:
                problems.append(f"stratum {name!r} overlaps another stratum")
            seen |= cs
            if name not in self.strat_cdim:
                problems.append(f"stratum {name!r} has no declared complex dimension")
            elif self.strat_cdim[name] < 0:
                problems.append(f"stratum {name!r} has negative complex dimension")
            if not (self.star(cs) & self.closure(cs)) == cs:
                problems.append(f"stratum {name!r} is not locally closed")
        missing = set(self.cells) - seen
        if missing:
            problems.append(f"cells {sorted(missing)} belong to no stratum")
        return problems

    # -- chain enumeration (shared by the derived-sections machinery) ------

    def chains(self, cells) -> list[tuple]:
        """All strictly increasing chains within the given cell subset."""
        key = frozenset(cells)
        if key in self._chains_cache:
            return self._chains_cache[key]
        members = sorted(key, key=lambda c: (self.dims[c], c))
        above = {
            c: [t for t in members if t != c and self.leq(c, t)] for c in members
        }
        out = []

        def extend(chain, last):
            out.append(tuple(chain))
            for c in above[last]:
                chain.append(c)
                extend(chain, c)
                chain.pop()

        for c in members:
            extend([c], c)
        out.sort(key=lambda ch: (len(ch), ch))
        self._chains_cache[key] = out
        return out

    # -- serialization ----------------------------------------------------

    def to_json(self):
        return {
            "schema": "perverscope/site-v1",
            "comment": self.comment,
            "cells": {c: self.dims[c] for c in self.cells},
            "covers": sorted([[a, b, s] for (a, b), s in self.covers.items()]),
            "strata": {name: sorted(cs) for name, cs in sorted(self.strata.items())},
            "strat_cdim": dict(sorted(self.strat_cdim.items())),
            "compact": self.compact,
            "affine": self.affine,
        }

    @classmethod
    def from_json(cls, obj, check=True) -> "CellSite":
        covers = {(a, b): s for a, b, s in obj.get("covers", [])}
        return cls(
            obj["cells"], covers, obj.get("strata"), obj.get("strat_cdim"),
            compact=obj.get("compact", False), affine=obj.get("affine", False),
            comment=obj.get("comment", ""), check=check,
        )


class Flag:
    """Nested decreasing sequence of closed (down-closed) subsites.

    steps[0] is the whole site; steps beyond the stored list count as empty.
    """

    def __init__(self, site: CellSite, steps, check=True):
        self.site = site
        self.steps = [frozenset(s) for s in steps]
        if check:
            if not self.steps or self.steps[0] != frozenset(site.cells):
                raise SiteError("flag must start with the whole site")
            prev = None
            for i, s in enumerate(self.steps):
                if prev is not None and not s <= prev:
                    raise SiteError(f"flag step {i} is not contained in step {i - 1}")
                if not site.is_down_closed(s):
                    raise SiteError(f"flag step {i} is not closed (down-closed)")
                prev = s

    def depth(self):
        return len(self.steps)

    def step(self, k) -> frozenset:
        if k <= 0:
            return self.steps[0]
        if k >= len(self.steps):
            return frozenset()
        return self.steps[k]

    def preimage(self, cmap: "CellMap") -> "Flag":
        return Flag(cmap.source, [cmap.preimage(s) for s in self.steps], check=True)

    def to_json(self):
        return {"schema": "perverscope/flag-v1", "steps": [sorted(s) for s in self.steps]}

    @classmethod
    def from_json(cls, site, obj) -> "Flag":
        return cls(site, [frozenset(s) for s in obj["steps"]])


class CellMap:
    """Cellular (monotone) map of sites; sends cells to cells."""

    def __init__(self, source: CellSite, target: CellSite, mapping, check=True):
        self.source, self.target = source, target
        self.mapping = dict(mapping)
        if check:
            missing = set(source.cells) - set(self.mapping)
            if missing:
                raise SiteError(f"map not defined on cells {sorted(missing)}")
            bad = set(self.mapping.values()) - set(target.cells)
            if bad:
                raise SiteError(f"map hits unknown target cells {sorted(bad)}")
            for (a, b) in source.covers:
                if not target.leq(self.mapping[a], self.mapping[b]):
                    raise SiteError(
                        f"map is not monotone on cover ({a!r}, {b!r})"
                    )

    def __call__(self, cell):
        return self.mapping[cell]

    def preimage(self, target_cells) -> frozenset:
        s = set(target_cells)
        return frozenset(c for c in self.source.cells if self.mapping[c] in s)

    @classmethod
    def identity(cls, site: CellSite) -> "CellMap":
        return cls(site, site, {c: c for c in site.cells}, check=False)

    def to_json(self):
        return {"schema": "perverscope/map-v1", "mapping": dict(sorted(self.mapping.items()))}
