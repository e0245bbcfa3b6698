"""Mutation-site feature vectors from charge-labeled protein structures.

Reads PQR files, selects the mutation-site and environment atom sets,
and runs two spectral models per ordered element pair:

  * degree-0 sweep over a Vietoris-Rips complex with the bipartite
    site/environment metric, and
  * degree-1 sweep over an alpha complex with the plain metric,

each summarized per grid threshold as a harmonic count plus eight
statistics of the nonharmonic spectrum. Wild-type, mutant, and their
difference are concatenated into one fixed-layout vector.
"""

from __future__ import annotations

import csv
import json
import warnings
from dataclasses import dataclass, field
from typing import Optional, Sequence, TextIO

import numpy as np

from .engine import (
    DEFAULT_TOL_ABS,
    DEFAULT_TOL_REL,
    STAT_NAMES,
    SpectrumSummary,
    parallel_map,
    psl_over_filtration,
)
from .errors import (
    GridMismatch,
    InputError,
    MalformedRecord,
    ResidueIdentityMismatch,
    ResidueNotFound,
)
from .filtration import build_alpha, build_vr
from .geometry import DistanceSpec, LabeledPointCloud, pairwise_distances
from .sheaf import SheafWeighting

DEFAULT_CUTOFF = 16.0
DEFAULT_GRID = (3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0)
DEFAULT_ELEMENTS = ("C", "N", "O")

VR_MODEL = "vr_q0"
ALPHA_MODEL = "alpha_q1"
MODELS = (VR_MODEL, ALPHA_MODEL)
STRUCTURES = ("wt", "mt", "diff")

LAYOUT_VERSION = "1"

RESIDUE_CODES = {
    "ALA": "A", "ARG": "R", "ASN": "N", "ASP": "D", "CYS": "C",
    "GLN": "Q", "GLU": "E", "GLY": "G", "HIS": "H", "ILE": "I",
    "LEU": "L", "LYS": "K", "MET": "M", "PHE": "F", "PRO": "P",
    "SER": "S", "THR": "T", "TRP": "W", "TYR": "Y", "VAL": "V",
}


class EmptyNeighborhoodWarning(UserWarning):
    """No environment atoms within the cutoff of the mutation site."""


@dataclass(frozen=True)
class PqrAtom:
    record: str
    serial: int
    name: str
    residue_name: str
    chain_id: str
    residue_number: int
    x: float
    y: float
    z: float
    charge: float
    radius: float
    element: str

    @property
    def coords(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z])


def infer_element(atom_name: str) -> str:
    """Element symbol from an atom name: the first alphabetic character,
    uppercased (leading digits as in '1HB' are skipped)."""
    for ch in atom_name:
        if ch.isalpha():
            return ch.upper()
    return ""


def parse_pqr_lines(lines: Sequence[str]) -> list[PqrAtom]:
    """Whitespace-tokenized ATOM/HETATM records.

    Accepts the 11-field form (with a chain column) and the 10-field
    chainless form; anything else raises MalformedRecord with the
    1-based line number. Non-atom lines are skipped.
    """
    atoms = []
    for line_no, raw in enumerate(lines, start=1):
        tokens = raw.split()
        if not tokens or tokens[0] not in ("ATOM", "HETATM"):
            continue
        if len(tokens) == 11:
            rec, serial, name, res_name, chain, res_num = tokens[:6]
            rest = tokens[6:]
        elif len(tokens) == 10:
            rec, serial, name, res_name, res_num = tokens[:5]
            chain = ""
            rest = tokens[5:]
        else:
            raise MalformedRecord(line_no, f"expected 10 or 11 fields, got {len(tokens)}")
        try:
            atoms.append(
                PqrAtom(
                    record=rec,
                    serial=int(serial),
                    name=name,
                    residue_name=res_name,
                    chain_id=chain,
                    residue_number=int(res_num),
                    x=float(rest[0]),
                    y=float(rest[1]),
                    z=float(rest[2]),
                    charge=float(rest[3]),
                    radius=float(rest[4]),
                    element=infer_element(name),
                )
            )
        except ValueError as exc:
            raise MalformedRecord(line_no, str(exc)) from exc
    return atoms


def parse_pqr(path: str) -> list[PqrAtom]:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_pqr_lines(fh.readlines())


@dataclass(frozen=True)
class MutationSpec:
    """A point mutation, written CHAIN:POS:WT:MT (e.g. A:39:Q:G)."""

    chain: str
    position: int
    wt_res: str
    mt_res: str

    @classmethod
    def parse(cls, text: str) -> "MutationSpec":
        parts = text.split(":")
        if len(parts) != 4:
            raise InputError(f"mutation must be CHAIN:POS:WT:MT, got {text!r}")
        chain, pos, wt, mt = parts
        if not chain:
            raise InputError(f"mutation chain must be nonempty in {text!r}")
        try:
            position = int(pos)
        except ValueError:
            raise InputError(f"mutation position must be an integer in {text!r}") from None
        wt, mt = wt.upper(), mt.upper()
        valid = set(RESIDUE_CODES.values())
        if wt not in valid or mt not in valid:
            raise InputError(f"unknown residue letter in {text!r}")
        return cls(chain=chain, position=position, wt_res=wt, mt_res=mt)

    @property
    def label(self) -> str:
        return f"{self.chain}:{self.position}:{self.wt_res}:{self.mt_res}"


@dataclass(frozen=True)
class FeatureConfig:
    cutoff: float = DEFAULT_CUTOFF
    grid: tuple[float, ...] = DEFAULT_GRID
    delta: float = 0.0
    elements: tuple[str, ...] = DEFAULT_ELEMENTS
    tol_rel: float = DEFAULT_TOL_REL
    tol_abs: float = DEFAULT_TOL_ABS
    threads: Optional[int] = None

    def __post_init__(self):
        if self.cutoff <= 0:
            raise InputError("cutoff must be positive")
        if self.delta < 0:
            raise InputError("delta must be nonnegative")
        grid = tuple(float(t) for t in self.grid)
        if not grid or any(b <= a for a, b in zip(grid, grid[1:])):
            raise InputError("grid must be nonempty and strictly ascending")
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "elements", tuple(self.elements))

    @property
    def block_size(self) -> int:
        """Per-channel feature count: one harmonic count per threshold plus
        the eight spectrum statistics per threshold."""
        return len(self.grid) * (1 + len(STAT_NAMES))

    @property
    def n_features(self) -> int:
        pairs = len(self.elements) ** 2
        return len(STRUCTURES) * len(MODELS) * pairs * self.block_size


def element_pair_sets(elements: Sequence[str] = DEFAULT_ELEMENTS) -> list[tuple[str, str]]:
    """Ordered element pairs (site element, environment element)."""
    return [(e1, e2) for e1 in elements for e2 in elements]


def feature_layout(config: FeatureConfig = FeatureConfig()) -> list[str]:
    """Names for every vector slot, in storage order. Structure-major:
    wt, mt, diff; then model; then element pair; then the per-threshold
    harmonic counts followed by the per-threshold statistics."""
    names = []
    for struct in STRUCTURES:
        for model in MODELS:
            for e1, e2 in element_pair_sets(config.elements):
                prefix = f"{struct}.{model}.{e1}{e2}"
                for t in config.grid:
                    names.append(f"{prefix}.betti.t{t:g}")
                for t in config.grid:
                    for stat in STAT_NAMES:
                        names.append(f"{prefix}.{stat}.t{t:g}")
    return names


def select_atom_sets(
    atoms: Sequence[PqrAtom],
    chain: str,
    position: int,
    config: FeatureConfig = FeatureConfig(),
) -> tuple[list[PqrAtom], list[PqrAtom]]:
    """Mutation-site atoms and their environment.

    Atoms whose element is outside config.elements are dropped first.
    The site is every retained atom of the residue (chain, position);
    the environment is every other retained atom within the inclusive
    cutoff of at least one site atom.
    """
    kept = [a for a in atoms if a.element in config.elements]
    site = [a for a in kept if a.chain_id == chain and a.residue_number == position]
    if not site:
        raise ResidueNotFound(f"no atoms for residue {chain}:{position} (after element filtering)")
    rest = [a for a in kept if not (a.chain_id == chain and a.residue_number == position)]
    site_xyz = np.array([[a.x, a.y, a.z] for a in site])
    env = []
    for a in rest:
        d = np.linalg.norm(site_xyz - np.array([a.x, a.y, a.z]), axis=1).min()
        if d <= config.cutoff:
            env.append(a)
    if not env:
        warnings.warn(
            f"no environment atoms within {config.cutoff} of {chain}:{position}",
            EmptyNeighborhoodWarning,
        )
    return site, env


def _site_residue_letter(site: Sequence[PqrAtom], where: str) -> str:
    names = {a.residue_name.upper() for a in site}
    if len(names) != 1:
        raise ResidueIdentityMismatch(f"{where}: mixed residue names at the site: {sorted(names)}")
    name = names.pop()
    code = RESIDUE_CODES.get(name)
    if code is None:
        raise ResidueIdentityMismatch(f"{where}: unrecognized residue name {name!r}")
    return code


def stats_block(
    sweep: list[tuple[float, SpectrumSummary]],
    grid: Sequence[float],
) -> np.ndarray:
    """Flatten one sweep into the per-channel block: harmonic counts for
    every threshold, then the eight statistics for every threshold."""
    got = [t for t, _ in sweep]
    want = [float(t) for t in grid]
    if got != want:
        raise GridMismatch(f"sweep grid {got} does not match requested grid {want}")
    vals = [float(s.betti) for _, s in sweep]
    for _, s in sweep:
        vals.extend(s.stats)
    return np.array(vals)


def _channel_values(
    site_sel: list[PqrAtom],
    env_sel: list[PqrAtom],
    model: str,
    config: FeatureConfig,
) -> np.ndarray:
    atoms = site_sel + env_sel
    coords = np.array([[a.x, a.y, a.z] for a in atoms])
    charges = np.array([a.charge for a in atoms])
    cloud = LabeledPointCloud.from_arrays(coords, charges, elements=[a.element for a in atoms])
    w = SheafWeighting(charges=cloud.charges)
    if model == VR_MODEL:
        spec = DistanceSpec.bipartite(range(len(site_sel)), range(len(site_sel), len(atoms)))
        dist = pairwise_distances(cloud, spec)
        fc = build_vr(dist, max_dim=1, max_scale=config.grid[-1] + config.delta)
        q = 0
    else:
        fc = build_alpha(cloud)
        q = 1
    sweep = psl_over_filtration(
        fc, cloud, w, config.grid, config.delta, q, config.tol_rel, config.tol_abs
    )
    return stats_block(sweep, config.grid)


@dataclass
class SiteFeatureVector:
    """One mutation site's full feature vector plus its layout metadata."""

    mutation: MutationSpec
    config: FeatureConfig
    values: np.ndarray
    empty_channels: tuple[str, ...] = ()
    layout_version: str = LAYOUT_VERSION

    @property
    def layout(self) -> list[str]:
        return feature_layout(self.config)

    def to_dict(self) -> dict:
        return {
            "site": self.mutation.label,
            "layout_version": self.layout_version,
            "n_features": int(len(self.values)),
            "grid": list(self.config.grid),
            "delta": self.config.delta,
            "cutoff": self.config.cutoff,
            "elements": list(self.config.elements),
            "empty_channels": list(self.empty_channels),
            "values": [float(v) for v in self.values],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def featurize_site(
    wt_atoms: Sequence[PqrAtom],
    mt_atoms: Sequence[PqrAtom],
    mutation: MutationSpec,
    config: FeatureConfig = FeatureConfig(),
    threads: Optional[int] = None,
) -> SiteFeatureVector:
    """Feature vector for one point mutation.

    Channels whose site-side or environment-side element selection is
    empty are zero-filled and recorded in empty_channels. The difference
    block is wild-type minus mutant, slot by slot.
    """
    wt_site, wt_env = select_atom_sets(wt_atoms, mutation.chain, mutation.position, config)
    mt_site, mt_env = select_atom_sets(mt_atoms, mutation.chain, mutation.position, config)

    wt_letter = _site_residue_letter(wt_site, "wild-type structure")
    if wt_letter != mutation.wt_res:
        raise ResidueIdentityMismatch(
            f"wild-type structure has {wt_letter} at {mutation.chain}:{mutation.position}, "
            f"mutation says {mutation.wt_res}"
        )
    mt_letter = _site_residue_letter(mt_site, "mutant structure")
    if mt_letter != mutation.mt_res:
        raise ResidueIdentityMismatch(
            f"mutant structure has {mt_letter} at {mutation.chain}:{mutation.position}, "
            f"mutation says {mutation.mt_res}"
        )

    pairs = element_pair_sets(config.elements)
    tasks = []
    for struct, site, env in (("wt", wt_site, wt_env), ("mt", mt_site, mt_env)):
        for model in MODELS:
            for e1, e2 in pairs:
                tasks.append((struct, model, e1, e2, site, env))

    def run(task):
        struct, model, e1, e2, site, env = task
        name = f"{struct}.{model}.{e1}{e2}"
        site_sel = [a for a in site if a.element == e1]
        env_sel = [a for a in env if a.element == e2]
        if not site_sel or not env_sel:
            return name, np.zeros(config.block_size), True
        return name, _channel_values(site_sel, env_sel, model, config), False

    results = parallel_map(run, tasks, threads if threads is not None else config.threads)
    half = len(results) // 2
    wt_vec = np.concatenate([vals for _, vals, _ in results[:half]])
    mt_vec = np.concatenate([vals for _, vals, _ in results[half:]])
    values = np.concatenate([wt_vec, mt_vec, wt_vec - mt_vec])
    empty = tuple(name for name, _, was_empty in results if was_empty)
    return SiteFeatureVector(mutation=mutation, config=config, values=values, empty_channels=empty)


def write_features_csv(
    vectors: Sequence[SiteFeatureVector],
    out: TextIO,
) -> None:
    """CSV with one row per site. The leading `site` column attributes
    rows; the remaining columns are the layout slot names."""
    if not vectors:
        raise InputError("nothing to write")
    layout = vectors[0].layout
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["site"] + layout)
    for vec in vectors:
        if len(vec.values) != len(layout):
            raise GridMismatch("feature vectors in one file must share a layout")
        writer.writerow([vec.mutation.label] + [repr(float(v)) for v in vec.values])
