"""Decomposition bookkeeping for semismall maps.

Works on symbolic stratification records (stratum dimension, fiber dimension,
fiber components, component monodromy), not on cell models: semismallness,
relevant strata, the shape of the direct-image decomposition, palindromicity
and codimension bounds, endomorphism-algebra dimensions cross-checked against
component counts, refined intersection forms, and the surface-resolution and
Hilbert-Chow special cases.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .hilbpart import partitions
from .localsys import MonodromyRep, isotypic_decomposition
from .ratlin import RationalMatrix


class StratificationError(ValueError):
    pass


@dataclass(frozen=True)
class StratumRecord:
    name: str
    dim_s: int            # complex dimension of the stratum
    fiber_dim: int        # complex dimension of the fiber over it
    components: int = 1   # top-dimensional irreducible components of the fiber
    monodromy: MonodromyRep | None = None  # permutation action on components

    def monodromy_rep(self) -> MonodromyRep:
        if self.monodromy is None:
            return MonodromyRep.trivial(self.components, ngens=1)
        return self.monodromy


@dataclass(frozen=True)
class MapStratification:
    dim_x: int
    strata: tuple
    generically_finite: bool = True

    def __post_init__(self):
        names = [s.name for s in self.strata]
        if len(set(names)) != len(names):
            raise StratificationError("stratum names must be distinct")
        for s in self.strata:
            if s.dim_s < 0 or s.fiber_dim < 0 or s.components < 1:
                raise StratificationError(f"malformed stratum record {s.name!r}")
            rep = s.monodromy
            if rep is not None:
                if rep.rank != s.components:
                    raise StratificationError(
                        f"stratum {s.name!r}: monodromy rank != component count"
                    )
                for g in rep.generators:
                    if not _is_permutation(g):
                        raise StratificationError(
                            f"stratum {s.name!r}: component monodromy must permute components"
                        )
        if self.generically_finite:
            dense = [s for s in self.strata if s.fiber_dim == 0]
            if len(dense) != 1:
                raise StratificationError(
                    "a generically finite map needs exactly one stratum with fiber dimension 0"
                )

    def to_json(self):
        return {
            "schema": "perverscope/mapstrat-v1",
            "dim_x": self.dim_x,
            "generically_finite": self.generically_finite,
            "strata": [
                {
                    "name": s.name,
                    "dim_s": s.dim_s,
                    "fiber_dim": s.fiber_dim,
                    "components": s.components,
                    **(
                        {"monodromy": [g.to_json() for g in s.monodromy.generators]}
                        if s.monodromy is not None
                        else {}
                    ),
                }
                for s in self.strata
            ],
        }

    @classmethod
    def from_json(cls, obj) -> "MapStratification":
        strata = []
        for rec in obj["strata"]:
            rep = None
            if "monodromy" in rec:
                gens = tuple(RationalMatrix.from_json(g) for g in rec["monodromy"])
                rep = MonodromyRep(rec["components"], gens)
            strata.append(
                StratumRecord(rec["name"], rec["dim_s"], rec["fiber_dim"],
                              rec.get("components", 1), rep)
            )
        return cls(obj["dim_x"], tuple(strata), obj.get("generically_finite", True))


def _is_permutation(m: RationalMatrix) -> bool:
    if not m.is_square():
        return False
    for row in m.data:
        if sorted(row) != [0] * (m.cols - 1) + [1]:
            return False
    for j in range(m.cols):
        if sorted(m.column(j)) != [0] * (m.rows - 1) + [1]:
            return False
    return True


# ---------------------------------------------------------------------------
# semismallness
# ---------------------------------------------------------------------------


def is_semismall(ms: MapStratification) -> bool:
    return all(s.dim_s + 2 * s.fiber_dim <= ms.dim_x for s in ms.strata)


def is_small(ms: MapStratification) -> bool:
    return is_semismall(ms) and all(
        s.dim_s + 2 * s.fiber_dim < ms.dim_x for s in ms.strata if s.fiber_dim > 0
    )


def relevant_strata(ms: MapStratification):
    if not is_semismall(ms):
        raise StratificationError("relevant strata are only defined for semismall maps")
    return [s for s in ms.strata if s.dim_s + 2 * s.fiber_dim == ms.dim_x]


def defect(ms: MapStratification, fiber_product_dim: int = None) -> int:
    """Defect of semismallness: dim of the fiber product minus dim of the
    source.  The stratification record determines the fiber-product dimension
    as max(dim S + 2 fiber dim); a separately known value may be supplied and
    wins (the record is a lower bound if strata are missing)."""
    bound = max(s.dim_s + 2 * s.fiber_dim for s in ms.strata) - ms.dim_x
    if fiber_product_dim is not None:
        r = fiber_product_dim - ms.dim_x
        if r < bound:
            raise StratificationError(
                "declared fiber-product dimension is below the record's lower bound"
            )
        return r
    return bound


# ---------------------------------------------------------------------------
# decomposition shapes
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DTSummand:
    stratum: str
    local_system: str      # label of the simple coefficient system
    rank: int              # rank of the simple local system
    multiplicity: int
    shift: int
    endo_dim: int = 1      # dimension of the endomorphism algebra of the simple

    def to_json(self):
        return {
            "stratum": self.stratum,
            "local_system": self.local_system,
            "rank": self.rank,
            "multiplicity": self.multiplicity,
            "shift": self.shift,
            "endo_dim": self.endo_dim,
        }


@dataclass
class DTShape:
    summands: list = field(default_factory=list)

    def to_json(self):
        return {"schema": "perverscope/shape-v1",
                "summands": [s.to_json() for s in self.summands]}

    @classmethod
    def from_json(cls, obj) -> "DTShape":
        return cls([DTSummand(s["stratum"], s["local_system"], s["rank"],
                              s["multiplicity"], s["shift"], s.get("endo_dim", 1))
                    for s in obj["summands"]])


def dt_semismall(ms: MapStratification) -> DTShape:
    """Shape of the direct-image decomposition of a semismall map: one
    summand per relevant stratum at shift 0, isotypically refined."""
    shape = DTShape()
    for s in relevant_strata(ms):
        pieces = isotypic_decomposition(s.monodromy_rep())
        for i, piece in enumerate(pieces):
            label = "trivial" if _is_trivial_piece(piece, s) else f"isotypic{i}"
            shape.summands.append(
                DTSummand(s.name, label, piece.simple_rank, piece.multiplicity, 0,
                          piece.endo_dim_of_simple)
            )
    return shape


def _is_trivial_piece(piece, s: StratumRecord) -> bool:
    if piece.simple_rank != 1:
        return False
    ones = RationalMatrix.from_columns([[1] * s.components])
    image = piece.projector * ones
    return not image.is_zero()


def palindromic_check(shape: DTShape) -> bool:
    """Shifts pair off symmetrically about 0 with matching ranks and
    multiplicities."""
    keyed = {}
    for s in shape.summands:
        key = (s.stratum, s.local_system, s.rank, s.multiplicity)
        keyed.setdefault(key, []).append(s.shift)
    for key, shifts in keyed.items():
        if sorted(shifts) != sorted(-b for b in shifts):
            return False
    return True


def gm_codim_bound(shape: DTShape, ms: MapStratification, d: int) -> bool:
    """For a map with equidimensional fibers of dimension d, every stratum in
    the shape has codimension at most d in the target."""
    dim_y = ms.dim_x - d
    dims = {s.name: s.dim_s for s in ms.strata}
    for summand in shape.summands:
        if summand.stratum not in dims:
            raise StratificationError(f"summand on unknown stratum {summand.stratum!r}")
        if dim_y - dims[summand.stratum] > d:
            return False
    return True


def endo_dimension(shape: DTShape, ms: MapStratification = None):
    """Dimension of the endomorphism algebra of the decomposition, plus the
    semisimple profile (sum of squared multiplicities).

    The dimension is the sum over summands of multiplicity^2 times the
    endomorphism dimension of the simple coefficient system; when the
    stratification record is supplied, the predicted number of top
    components of the fiber product (orbits of the component monodromy on
    pairs, summed over relevant strata) is returned and must agree.
    """
    dim = sum(s.multiplicity ** 2 * s.endo_dim for s in shape.summands)
    profile = sum(s.multiplicity ** 2 for s in shape.summands)
    components = None
    if ms is not None:
        components = 0
        for s in relevant_strata(ms):
            components += _pair_orbit_count(s)
        if components != dim:
            raise StratificationError(
                "endomorphism dimension does not match the component count "
                f"({dim} vs {components})"
            )
    return dim, profile, components


def _pair_orbit_count(s: StratumRecord) -> int:
    """Orbits of the component monodromy acting on ordered pairs of fiber
    components (Burnside over the enumerated image)."""
    from .localsys import group_closure

    rep = s.monodromy_rep()
    elements = group_closure(rep.generators) if rep.generators else [RationalMatrix.identity(rep.rank)]
    n = rep.rank
    total = 0
    for g in elements:
        fixed = sum(1 for i in range(n) if g.data[i][i] == 1)
        total += fixed * fixed
    assert total % len(elements) == 0
    return total // len(elements)


# ---------------------------------------------------------------------------
# refined intersection forms and the surface-resolution case
# ---------------------------------------------------------------------------


def refined_form_sign(M: RationalMatrix, d: int) -> bool:
    """Is (-1)^d M positive definite?  Exact Sylvester criterion."""
    if not M.is_square():
        raise StratificationError("intersection form must be square")
    if M != M.transpose():
        raise StratificationError("intersection form must be symmetric")
    sign = (-1) ** d
    signed = M.scale(sign)
    for k in range(1, M.rows + 1):
        minor = signed.submatrix(range(k), range(k)).determinant()
        if minor <= 0:
            return False
    return True


@dataclass
class SurfaceResolutionReport:
    point_ranks: dict
    orthogonal: bool = True

    def to_json(self):
        return {"point_ranks": dict(sorted(self.point_ranks.items())),
                "orthogonal_summands": self.orthogonal}


def surface_resolution_dt(exceptional: dict) -> tuple[DTShape, SurfaceResolutionReport]:
    """Direct image of a surface resolution: the intersection complex of the
    target plus one skyscraper per singular point spanned by the classes of
    the exceptional components.

    exceptional maps point name -> symmetric intersection matrix of the
    exceptional curves.  Each matrix must be negative definite; otherwise the
    splitting is obstructed and an error is raised.
    """
    shape = DTShape()
    shape.summands.append(DTSummand("surface", "trivial", 1, 1, 0))
    ranks = {}
    for point, M in sorted(exceptional.items()):
        if not refined_form_sign(M, 1):
            raise StratificationError(
                f"splitting obstructed at {point!r}: intersection form is not "
                "negative definite"
            )
        ranks[point] = M.rows
        shape.summands.append(DTSummand(point, "skyscraper", M.rows, 1, 0))
    # the two kinds of summands pair to zero: no maps between an intersection
    # complex with dense support and a skyscraper
    return shape, SurfaceResolutionReport(ranks, orthogonal=True)


# ---------------------------------------------------------------------------
# Hilbert-Chow
# ---------------------------------------------------------------------------


def hilbert_chow_strat(n: int) -> MapStratification:
    """Stratification record of the Hilbert-Chow map for n points on a
    surface: one stratum per partition, with stratum dimension twice the
    length and fiber dimension the colength."""
    if n < 1:
        raise StratificationError("need at least one point")
    strata = []
    for part in partitions(n):
        name = "p" + "_".join(str(p) for p in part.parts)
        strata.append(StratumRecord(name, 2 * part.length, part.colength, 1, None))
    return MapStratification(2 * n, tuple(strata))
