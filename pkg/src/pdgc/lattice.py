"""Redundancy lattice over driver subsets and the causality decomposition.

Atoms are antichains of nonempty driver subsets. The precedence relation
``alpha <= beta`` holds when every collection of ``beta`` contains some
collection of ``alpha``; redundancy assigns each atom the pointwise minimum
of its collections' spectral causality curves, and Moebius inversion over the
lattice recovers additive atom curves. Atoms aggregate into unique, redundant
and synergistic components that partition the full causality spectrum.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Mapping

import numpy as np

from .series import Band, FrequencyGrid
from .spectral import SpectralFunction, integrate_band, spectral_gc
from .state_space import StateSpaceModel
from .validation import check_channel_indices

__all__ = [
    "Atom",
    "GcLattice",
    "PdgcResult",
    "build_lattice",
    "atom_precedes",
    "classify_atom",
    "spectral_redundancy",
    "moebius_invert",
    "coarse_grain",
    "CoarseComponents",
    "decompose",
    "MAX_SOURCES",
]

# antichain counts grow super-exponentially (4, 18, 166, 7579, ...)
MAX_SOURCES = 4


@dataclass(frozen=True)
class Atom:
    """An antichain of nonempty driver subsets (1-based source ids)."""

    collections: frozenset[frozenset[int]]

    def __post_init__(self):
        collections = frozenset(frozenset(int(i) for i in s) for s in self.collections)
        if not collections:
            raise ValueError("an atom needs at least one collection")
        for subset in collections:
            if not subset:
                raise ValueError("collections must be nonempty subsets")
            if min(subset) < 1:
                raise ValueError("source ids are 1-based")
        for a, b in combinations(collections, 2):
            if a <= b or b <= a:
                raise ValueError(
                    f"collections must be pairwise incomparable, got {sorted(a)} "
                    f"and {sorted(b)}"
                )
        object.__setattr__(self, "collections", collections)

    @classmethod
    def of(cls, *subsets) -> "Atom":
        """Convenience constructor: ``Atom.of({1}, {2, 3})``."""
        return cls(frozenset(frozenset(s) for s in subsets))

    @property
    def sorted_collections(self) -> tuple[tuple[int, ...], ...]:
        return tuple(sorted(tuple(sorted(s)) for s in self.collections))

    def key(self) -> str:
        """Canonical text form, e.g. ``{1}{2,3}``."""
        return "".join(
            "{" + ",".join(str(i) for i in s) + "}" for s in self.sorted_collections
        )

    def __repr__(self):
        return f"Atom({self.key()})"


def atom_precedes(alpha: Atom, beta: Atom) -> bool:
    """Lattice precedence: every collection of beta contains one of alpha."""
    return all(
        any(a <= b for a in alpha.collections) for b in beta.collections
    )


def classify_atom(atom: Atom) -> tuple[str, int | None]:
    """Coarse class of an atom: ("unique", i), ("redundant", None) or ("synergistic", None).

    A lone singleton collection is unique to its source; several collections
    that are all singletons carry redundant information; any atom with a
    multi-source collection is synergistic.
    """
    subsets = atom.sorted_collections
    if len(subsets) == 1 and len(subsets[0]) == 1:
        return "unique", subsets[0][0]
    if all(len(s) == 1 for s in subsets):
        return "redundant", None
    return "synergistic", None


@dataclass(frozen=True)
class GcLattice:
    """All atoms for ``n_sources`` drivers, ordered bottom-to-top.

    ``atoms`` is a linear extension of the lattice order (the bottom atom of
    all singletons first, the full-set atom last); ``precedes_matrix[i, j]``
    says whether ``atoms[i] <= atoms[j]``.
    """

    n_sources: int
    atoms: tuple[Atom, ...]
    precedes_matrix: np.ndarray = field(repr=False)

    def __len__(self):
        return len(self.atoms)

    def index_of(self, atom: Atom) -> int:
        try:
            return self.atoms.index(atom)
        except ValueError:
            raise ValueError(f"{atom!r} is not an atom of this lattice") from None

    def strictly_below(self, i: int) -> np.ndarray:
        """Indices of atoms strictly below ``atoms[i]``."""
        mask = self.precedes_matrix[:, i].copy()
        mask[i] = False
        return np.flatnonzero(mask)

    @property
    def bottom(self) -> Atom:
        return self.atoms[0]

    @property
    def top(self) -> Atom:
        return self.atoms[-1]

    def cover_pairs(self) -> list[tuple[int, int]]:
        """(lower, upper) index pairs where upper covers lower."""
        n = len(self.atoms)
        strict = self.precedes_matrix & ~np.eye(n, dtype=bool)
        covers = []
        for i in range(n):
            for j in range(n):
                if strict[i, j] and not np.any(strict[i] & strict[:, j]):
                    covers.append((i, j))
        return covers


def build_lattice(n_sources: int) -> GcLattice:
    """Enumerate every antichain of nonempty subsets of ``{1..n_sources}``.

    Sizes are 1, 4, 18 and 166 for one to four sources; larger source counts
    are rejected.
    """
    n = int(n_sources)
    if not 1 <= n <= MAX_SOURCES:
        raise ValueError(f"source count must be in 1..{MAX_SOURCES}, got {n}")
    subsets = [
        frozenset(c)
        for r in range(1, n + 1)
        for c in combinations(range(1, n + 1), r)
    ]
    ns = len(subsets)
    comparable = np.zeros((ns, ns), dtype=bool)
    for i in range(ns):
        for j in range(ns):
            comparable[i, j] = subsets[i] <= subsets[j] or subsets[j] <= subsets[i]

    found: list[Atom] = []

    def extend(start: int, chosen: list[int]):
        if chosen:
            found.append(Atom(frozenset(subsets[i] for i in chosen)))
        for i in range(start, ns):
            if all(not comparable[i, j] for j in chosen):
                extend(i + 1, chosen + [i])

    extend(0, [])

    m = len(found)
    precedes = np.zeros((m, m), dtype=bool)
    for i in range(m):
        for j in range(m):
            precedes[i, j] = atom_precedes(found[i], found[j])

    # sort by strict-downset size: a deterministic linear extension
    downset_sizes = precedes.sum(axis=0)
    order = sorted(range(m), key=lambda i: (downset_sizes[i], found[i].key()))
    atoms = tuple(found[i] for i in order)
    precedes = precedes[np.ix_(order, order)]
    precedes.setflags(write=False)
    return GcLattice(n, atoms, precedes)


def spectral_redundancy(
    atom: Atom, gc_curves: Mapping[frozenset, SpectralFunction]
) -> SpectralFunction:
    """Pointwise minimum of the atom's collections' causality curves."""
    stack = []
    template = None
    for subset in atom.sorted_collections:
        key = frozenset(subset)
        if key not in gc_curves:
            raise ValueError(f"missing causality curve for driver subset {set(subset)}")
        curve = gc_curves[key]
        template = template or curve
        stack.append(curve.values)
    return template.with_values(np.minimum.reduce(stack))


def moebius_invert(
    lattice: GcLattice, redundancies: Mapping[Atom, SpectralFunction]
) -> dict[Atom, SpectralFunction]:
    """Recover atom curves from redundancy curves over the lattice order.

    Processing atoms bottom-to-top, each atom curve is its redundancy minus
    the atom curves strictly below it; the curves sum back to the top
    redundancy.
    """
    for atom in lattice.atoms:
        if atom not in redundancies:
            raise ValueError(f"missing redundancy curve for {atom!r}")
    values = np.stack([redundancies[a].values for a in lattice.atoms])
    deltas = np.empty_like(values)
    for i in range(len(lattice.atoms)):
        deltas[i] = values[i]
        below = lattice.strictly_below(i)
        if below.size:
            deltas[i] -= deltas[below].sum(axis=0)
    template = redundancies[lattice.atoms[0]]
    return {
        atom: template.with_values(deltas[i]) for i, atom in enumerate(lattice.atoms)
    }


@dataclass(frozen=True)
class CoarseComponents:
    """Unique/redundant/synergistic aggregation of the atom curves."""

    unique: dict[int, SpectralFunction]
    redundant: SpectralFunction
    synergistic: SpectralFunction


def coarse_grain(
    lattice: GcLattice, atom_curves: Mapping[Atom, SpectralFunction]
) -> CoarseComponents:
    """Sum atom curves per coarse class; the components partition the total."""
    template = atom_curves[lattice.atoms[0]]
    zeros = np.zeros(template.grid.n_points)
    unique = {i: zeros.copy() for i in range(1, lattice.n_sources + 1)}
    redundant = zeros.copy()
    synergistic = zeros.copy()
    for atom in lattice.atoms:
        kind, source = classify_atom(atom)
        values = atom_curves[atom].values
        if kind == "unique":
            unique[source] += values
        elif kind == "redundant":
            redundant += values
        else:
            synergistic += values
    return CoarseComponents(
        unique={i: template.with_values(v) for i, v in unique.items()},
        redundant=template.with_values(redundant),
        synergistic=template.with_values(synergistic),
    )


@dataclass
class PdgcResult:
    """Everything produced by one decomposition run.

    Spectral curves are keyed the same way they are exported: atoms by their
    canonical string over source ids, coarse components by class. Band
    integrals live in ``band_values[curve_name][band_name]`` with the
    reserved band name ``whole`` for full-range integration. ``significance``
    stays ``None`` until a surrogate test fills it.
    """

    target: int
    drivers: tuple[int, ...]
    labels: tuple[str, ...]
    grid: FrequencyGrid
    bands: tuple[Band, ...]
    lattice: GcLattice
    full: SpectralFunction
    redundancy: dict[Atom, SpectralFunction]
    atoms: dict[Atom, SpectralFunction]
    coarse: CoarseComponents
    band_values: dict[str, dict[str, float]]
    significance: dict | None = None

    def driver_label(self, source_id: int) -> str:
        """Channel label of a 1-based source id."""
        return self.labels[self.drivers[source_id - 1]]

    def atom_label(self, atom: Atom) -> str:
        """Canonical atom string with channel labels, e.g. ``{RESP}{SAP}``."""
        return "".join(
            "{" + ",".join(self.driver_label(i) for i in s) + "}"
            for s in atom.sorted_collections
        )

    def spectra(self) -> list[tuple[str, SpectralFunction]]:
        """Exported curves in deterministic order (the spectra.csv inventory)."""
        out = [("full", self.full)]
        out.extend(
            (f"atom:{self.atom_label(atom)}", self.atoms[atom])
            for atom in self.lattice.atoms
        )
        out.extend(
            (f"unique:{self.driver_label(i)}", self.coarse.unique[i])
            for i in range(1, self.lattice.n_sources + 1)
        )
        out.append(("redundant", self.coarse.redundant))
        out.append(("synergistic", self.coarse.synergistic))
        return out

    def to_dict(self) -> dict:
        """JSON-ready summary: scalars and per-band tables, no curves."""
        doc = {
            "target": self.labels[self.target],
            "drivers": [self.labels[d] for d in self.drivers],
            "fs": self.grid.fs,
            "n_freqs": self.grid.n_points,
            "bands": [
                {"name": b.name, "f_lo": b.f_lo, "f_hi": b.f_hi} for b in self.bands
            ],
            "atoms": [
                {
                    "atom": atom.key(),
                    "label": self.atom_label(atom),
                    "class": classify_atom(atom)[0],
                }
                for atom in self.lattice.atoms
            ],
            "band_values": self.band_values,
        }
        if self.significance is not None:
            doc["significance"] = {
                measure: {
                    band: report.to_dict() for band, report in per_band.items()
                }
                for measure, per_band in self.significance.items()
            }
        return doc


def _integrate_all(curve: SpectralFunction, bands) -> dict[str, float]:
    values = {"whole": integrate_band(curve).value}
    for band in bands:
        values[band.name] = integrate_band(curve, band).value
    return values


def decompose(
    ss: StateSpaceModel,
    target: int,
    drivers,
    grid: FrequencyGrid,
    bands=(),
) -> PdgcResult:
    """Full causality decomposition of the drivers' influence on the target.

    Computes the spectral causality of every nonempty driver subset once,
    assigns redundancies over the lattice, inverts to atom curves, aggregates
    coarse components, and integrates everything whole-band and over each
    requested band.
    """
    target, drivers = check_channel_indices(ss.n_channels, target, drivers)
    n = len(drivers)
    if not 1 <= n <= MAX_SOURCES:
        raise ValueError(f"need 1..{MAX_SOURCES} drivers, got {n}")
    bands = tuple(bands)
    names = [b.name for b in bands]
    if "whole" in names or len(set(names)) != len(names):
        raise ValueError(f"band names must be unique and not 'whole', got {names}")

    lattice = build_lattice(n)
    gc_curves: dict[frozenset, SpectralFunction] = {}
    for r in range(1, n + 1):
        for combo in combinations(range(1, n + 1), r):
            channels = tuple(drivers[i - 1] for i in combo)
            gc_curves[frozenset(combo)] = spectral_gc(ss, target, channels, grid)

    redundancy = {
        atom: spectral_redundancy(atom, gc_curves) for atom in lattice.atoms
    }
    atom_curves = moebius_invert(lattice, redundancy)
    coarse = coarse_grain(lattice, atom_curves)
    full = gc_curves[frozenset(range(1, n + 1))]

    result = PdgcResult(
        target=target,
        drivers=drivers,
        labels=ss.labels,
        grid=grid,
        bands=bands,
        lattice=lattice,
        full=full,
        redundancy=redundancy,
        atoms=atom_curves,
        coarse=coarse,
        band_values={},
    )
    band_values = {"full": _integrate_all(full, bands)}
    for atom in lattice.atoms:
        band_values[f"atom:{result.atom_label(atom)}"] = _integrate_all(
            atom_curves[atom], bands
        )
        band_values[f"redundancy:{result.atom_label(atom)}"] = _integrate_all(
            redundancy[atom], bands
        )
    for i in range(1, n + 1):
        band_values[f"unique:{result.driver_label(i)}"] = _integrate_all(
            coarse.unique[i], bands
        )
    band_values["redundant"] = _integrate_all(coarse.redundant, bands)
    band_values["synergistic"] = _integrate_all(coarse.synergistic, bands)
    result.band_values = band_values
    return result
