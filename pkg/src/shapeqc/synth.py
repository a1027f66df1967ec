"""Synthetic organ-shape corpus: deformed ellipsoids plus injected defects.

Good shapes are smoothly bumped ellipsoids placed at a fixed anatomical-style
offset, so their inferior extent (min_z) stays inside a narrow documented
band. Bad shapes are Good shapes passed through one defect transform. The
taxonomy is an artifact stand-in for expert categories: incomplete geometry
(truncate_inferior, fragment), artifacted geometry (spikes), and non-organ
output (scale_anomaly, slab_nonorgan).

All randomness is derived from explicit seeds via the package RNG convention,
so corpora are exactly reproducible from their manifest.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path

import numpy as np

from .corpus import (
    DEFECT_CATEGORY,
    DEFECT_KINDS,
    CorpusItem,
    CorpusManifest,
    DefectSpec,
    QualityLabel,
    SourceCategory,
    map_label,
)
from .errors import InvalidSpecError
from .mesh_io import TriangleMesh, save_mesh
from .numeric import rng_from_seed, spawn_seeds

# Good-shape geometry: ellipsoid semi-axes in millimetre-like units, placed
# so the shape floats above z = 0 the way an organ sits in scanner coordinates.
GOOD_AXES = (150.0, 100.0, 80.0)
GOOD_AXIS_JITTER = 0.20
GOOD_CENTER = (0.0, 0.0, 250.0)
GOOD_CENTER_JITTER = 5.0
GOOD_BUMP_RANGE = (0.04, 0.10)
ICOSPHERE_SUBDIVISIONS = 3

# Empirical band for the min_z feature of sampled Good clouds (derived from
# the generator bounds above, then verified over a large seed sweep).
GOOD_MIN_Z_BAND = (138.0, 200.0)

# Per-kind magnitude ranges used when generate_corpus draws defect severities.
MAGNITUDE_RANGES = {
    "truncate_inferior": (0.25, 0.60),
    "fragment": (0.25, 0.90),
    "spikes": (0.30, 1.00),
    "scale_anomaly": (0.25, 1.00),
    "slab_nonorgan": (0.20, 0.80),
}

# Benchmark defect mix; slab_nonorgan is available but not part of the default.
DEFAULT_DEFECT_MIX = {
    "truncate_inferior": 0.40,
    "fragment": 0.30,
    "spikes": 0.15,
    "scale_anomaly": 0.15,
}


@lru_cache(maxsize=4)
def _unit_icosphere(subdivisions: int):
    phi = (1.0 + math.sqrt(5.0)) / 2.0
    verts = [
        (-1, phi, 0), (1, phi, 0), (-1, -phi, 0), (1, -phi, 0),
        (0, -1, phi), (0, 1, phi), (0, -1, -phi), (0, 1, -phi),
        (phi, 0, -1), (phi, 0, 1), (-phi, 0, -1), (-phi, 0, 1),
    ]
    verts = [tuple(c / math.sqrt(sum(v * v for v in vert)) for c in vert) for vert in verts]
    faces = [
        (0, 11, 5), (0, 5, 1), (0, 1, 7), (0, 7, 10), (0, 10, 11),
        (1, 5, 9), (5, 11, 4), (11, 10, 2), (10, 7, 6), (7, 1, 8),
        (3, 9, 4), (3, 4, 2), (3, 2, 6), (3, 6, 8), (3, 8, 9),
        (4, 9, 5), (2, 4, 11), (6, 2, 10), (8, 6, 7), (9, 8, 1),
    ]
    for _ in range(subdivisions):
        cache: dict[tuple[int, int], int] = {}

        def midpoint(a: int, b: int) -> int:
            key = (a, b) if a < b else (b, a)
            if key in cache:
                return cache[key]
            mx, my, mz = (
                (verts[a][0] + verts[b][0]) / 2.0,
                (verts[a][1] + verts[b][1]) / 2.0,
                (verts[a][2] + verts[b][2]) / 2.0,
            )
            norm = math.sqrt(mx * mx + my * my + mz * mz)
            verts.append((mx / norm, my / norm, mz / norm))
            cache[key] = len(verts) - 1
            return cache[key]

        nxt = []
        for a, b, c in faces:
            ab, bc, ca = midpoint(a, b), midpoint(b, c), midpoint(c, a)
            nxt.extend([(a, ab, ca), (b, bc, ab), (c, ca, bc), (ab, bc, ca)])
        faces = nxt
    V = np.asarray(verts, dtype=np.float64)
    F = np.asarray(faces, dtype=np.int64)
    V.setflags(write=False)
    F.setflags(write=False)
    return V, F


def icosphere(subdivisions: int = ICOSPHERE_SUBDIVISIONS) -> TriangleMesh:
    """Unit icosphere; subdivision 3 gives 642 vertices / 1280 faces."""
    if subdivisions < 0 or subdivisions > 6:
        raise InvalidSpecError(f"subdivisions must be in [0, 6], got {subdivisions}")
    V, F = _unit_icosphere(subdivisions)
    return TriangleMesh(V.copy(), F.copy())


def _good_mesh(seed: int) -> TriangleMesh:
    rng = rng_from_seed(seed)
    unit_v, faces = _unit_icosphere(ICOSPHERE_SUBDIVISIONS)

    axes = np.asarray(GOOD_AXES) * (1.0 + rng.uniform(-GOOD_AXIS_JITTER, GOOD_AXIS_JITTER, 3))
    n_waves = 4
    dirs = rng.normal(size=(n_waves, 3))
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    freqs = rng.uniform(1.0, 2.5, n_waves)
    phases = rng.uniform(0.0, 2.0 * np.pi, n_waves)
    amps = rng.uniform(0.5, 1.0, n_waves)
    target = rng.uniform(*GOOD_BUMP_RANGE)
    center = np.asarray(GOOD_CENTER) + rng.uniform(-GOOD_CENTER_JITTER, GOOD_CENTER_JITTER, 3)

    proj = unit_v @ dirs.T  # (V, n_waves), values in [-1, 1]
    raw = np.sum(amps * np.cos(freqs * np.pi * proj + phases), axis=1)
    peak = np.max(np.abs(raw))
    bump = np.zeros(len(unit_v)) if peak < 1e-12 else raw * (target / peak)

    verts = center + unit_v * axes * (1.0 + bump)[:, None]
    return TriangleMesh(verts, np.asarray(faces))


def _truncate_inferior(mesh: TriangleMesh, magnitude: float) -> TriangleMesh:
    """Clip everything below z_cut = z_min + magnitude * height, cap the hole.

    New rim vertices get z = z_cut exactly and the cap is a centroid fan over
    the rim segments, so the output's lowest coordinate equals z_cut.
    """
    v, f = mesh.vertices, mesh.faces
    z = v[:, 2]
    z_min, z_max = float(z.min()), float(z.max())
    z_cut = z_min + magnitude * (z_max - z_min)
    above = z >= z_cut

    new_verts: list[np.ndarray] = []
    vert_map: dict[int, int] = {}
    edge_map: dict[tuple[int, int], int] = {}

    def keep_vertex(i: int) -> int:
        if i not in vert_map:
            vert_map[i] = len(new_verts)
            new_verts.append(v[i].copy())
        return vert_map[i]

    def cut_vertex(i: int, j: int) -> int:
        key = (i, j) if i < j else (j, i)
        if key not in edge_map:
            t = (z_cut - z[i]) / (z[j] - z[i])
            p = v[i] + t * (v[j] - v[i])
            p[2] = z_cut
            edge_map[key] = len(new_verts)
            new_verts.append(p)
        return edge_map[key]

    faces: list[tuple[int, int, int]] = []
    rim: list[tuple[int, int]] = []
    for tri in f:
        mask = above[tri]
        n_up = int(mask.sum())
        if n_up == 0:
            continue
        if n_up == 3:
            faces.append(tuple(keep_vertex(int(i)) for i in tri))
            continue
        # rotate indices so the first vertex is the lone one on its side
        order = [int(tri[0]), int(tri[1]), int(tri[2])]
        if n_up == 1:
            while not above[order[0]]:
                order = order[1:] + order[:1]
            a, b, c = order  # a above, b and c below
            pab = cut_vertex(a, b)
            pca = cut_vertex(c, a)
            faces.append((keep_vertex(a), pab, pca))
            rim.append((pab, pca))
        else:
            while above[order[0]] or not above[order[1]]:
                order = order[1:] + order[:1]
            a, b, c = order  # a below, b and c above
            pab = cut_vertex(a, b)
            pca = cut_vertex(c, a)
            kb, kc = keep_vertex(b), keep_vertex(c)
            faces.append((pab, kb, kc))
            faces.append((pab, kc, pca))
            rim.append((pca, pab))
    if not faces:
        raise InvalidSpecError(
            f"truncation magnitude {magnitude} removes the entire mesh"
        )
    if rim:
        ring = np.asarray([new_verts[a] for a, _ in rim] + [new_verts[b] for _, b in rim])
        centroid = ring.mean(axis=0)
        centroid[2] = z_cut
        ci = len(new_verts)
        new_verts.append(centroid)
        for a, b in rim:
            if a != b:
                faces.append((a, b, ci))
    return TriangleMesh(np.asarray(new_verts), np.asarray(faces, dtype=np.int64))


def _fragment(mesh: TriangleMesh, magnitude: float, rng: np.random.Generator) -> TriangleMesh:
    """Delete every face whose z-range touches an interior slab of the shape.

    The slab is thicker than any single face, so the surviving faces form at
    least two edge-connected components (a part below and a part above).
    """
    v, f = mesh.vertices, mesh.faces
    z = v[:, 2]
    z_min, z_max = float(z.min()), float(z.max())
    h = z_max - z_min
    thickness = (0.10 + 0.25 * magnitude) * h
    position = rng.uniform(0.35, 0.65)
    lo = z_min + position * h - thickness / 2.0
    hi = z_min + position * h + thickness / 2.0

    fz = z[f]
    keep = (fz.max(axis=1) < lo) | (fz.min(axis=1) > hi)
    kept = f[keep]
    if len(kept) == 0:
        raise InvalidSpecError("fragment slab removed every face")
    used = np.unique(kept)
    remap = np.full(len(v), -1, dtype=np.int64)
    remap[used] = np.arange(len(used))
    return TriangleMesh(v[used], remap[kept])


def _spikes(mesh: TriangleMesh, magnitude: float, rng: np.random.Generator) -> TriangleMesh:
    """Displace magnitude*1% of vertices outward by up to half the bound radius."""
    v = mesh.vertices.copy()
    center = v.mean(axis=0)
    radii = np.linalg.norm(v - center, axis=1)
    r_bound = float(radii.max())
    count = max(1, int(round(magnitude * 0.01 * len(v))))
    idx = rng.choice(len(v), size=count, replace=False)
    lengths = rng.uniform(0.4, 1.0, count) * 0.5 * r_bound
    for k, i in enumerate(idx):
        direction = v[i] - center
        norm = np.linalg.norm(direction)
        if norm < 1e-12:
            direction, norm = np.array([0.0, 0.0, 1.0]), 1.0
        v[i] = v[i] + direction / norm * lengths[k]
    return TriangleMesh(v, mesh.faces.copy())


def _scale_anomaly(mesh: TriangleMesh, magnitude: float) -> TriangleMesh:
    return TriangleMesh(mesh.vertices * (1.0 + 3.0 * magnitude), mesh.faces.copy())


def _slab_nonorgan(magnitude: float, rng: np.random.Generator) -> TriangleMesh:
    """Thin axis-aligned box; geometry unrelated to any organ."""
    L = 140.0 * (1.0 + magnitude)
    W = 100.0 * (1.0 + 0.5 * magnitude)
    T = rng.uniform(2.0, 8.0)
    center = np.asarray(GOOD_CENTER) + rng.uniform(-10.0, 10.0, 3)
    hx, hy, hz = L / 2.0, W / 2.0, T / 2.0
    corners = np.array(
        [
            [-hx, -hy, -hz], [hx, -hy, -hz], [hx, hy, -hz], [-hx, hy, -hz],
            [-hx, -hy, hz], [hx, -hy, hz], [hx, hy, hz], [-hx, hy, hz],
        ]
    )
    faces = np.array(
        [
            (0, 2, 1), (0, 3, 2),
            (4, 5, 6), (4, 6, 7),
            (0, 1, 5), (0, 5, 4),
            (1, 2, 6), (1, 6, 5),
            (2, 3, 7), (2, 7, 6),
            (3, 0, 4), (3, 4, 7),
        ],
        dtype=np.int64,
    )
    return TriangleMesh(center + corners, faces)


def generate_shape(good: bool, defect: DefectSpec | None = None, seed: int = 0) -> TriangleMesh:
    """One synthetic shape: a Good base, optionally passed through a defect.

    Deterministic per (good, defect, seed); the base shape uses `seed`, the
    defect transform uses `defect.seed`.
    """
    if good:
        if defect is not None:
            raise InvalidSpecError("Good shapes take no defect")
        return _good_mesh(seed)
    if defect is None:
        raise InvalidSpecError("Bad shapes require a DefectSpec")
    if defect.kind == "slab_nonorgan":
        return _slab_nonorgan(defect.magnitude, rng_from_seed(defect.seed))
    base = _good_mesh(seed)
    if defect.kind == "truncate_inferior":
        return _truncate_inferior(base, defect.magnitude)
    if defect.kind == "fragment":
        return _fragment(base, defect.magnitude, rng_from_seed(defect.seed))
    if defect.kind == "spikes":
        return _spikes(base, defect.magnitude, rng_from_seed(defect.seed))
    return _scale_anomaly(base, defect.magnitude)


@dataclass(frozen=True)
class GeneratedShape:
    item: CorpusItem
    mesh: TriangleMesh


def _normalize_mix(defect_mix) -> dict[str, float]:
    mix = dict(DEFAULT_DEFECT_MIX if defect_mix is None else defect_mix)
    unknown = set(mix) - set(DEFECT_KINDS)
    if unknown:
        raise InvalidSpecError(f"unknown defect kinds in mix: {sorted(unknown)}")
    if any(w < 0 for w in mix.values()):
        raise InvalidSpecError("defect mix weights must be non-negative")
    total = sum(mix.values())
    if total <= 0:
        raise InvalidSpecError("defect mix weights must sum to a positive value")
    return {k: mix[k] / total for k in DEFECT_KINDS if mix.get(k, 0.0) > 0}


def _mix_counts(n_bad: int, mix: dict[str, float]) -> dict[str, int]:
    # largest-remainder apportionment in fixed kind order
    quotas = {k: n_bad * w for k, w in mix.items()}
    counts = {k: int(math.floor(q)) for k, q in quotas.items()}
    left = n_bad - sum(counts.values())
    order = sorted(mix, key=lambda k: (-(quotas[k] - math.floor(quotas[k])), DEFECT_KINDS.index(k)))
    for k in order:
        if left == 0:
            break
        counts[k] += 1
        left -= 1
    return counts


_KIND_SHORT = {
    "truncate_inferior": "trunc",
    "fragment": "frag",
    "spikes": "spike",
    "scale_anomaly": "scale",
    "slab_nonorgan": "slab",
}


def generate_corpus(
    n_good: int, n_bad: int, defect_mix=None, seed: int = 0
) -> list[GeneratedShape]:
    """Generate n_good + n_bad shapes with per-item derived seeds.

    Bad items are spread over the defect mix by largest-remainder counts;
    each Bad item draws its magnitude from the kind's documented range. Item
    mesh_path fields hold the relative path `meshes/<id>.obj` that
    write_corpus uses, so manifests are identical whether or not the meshes
    have been written yet.
    """
    if n_good < 0 or n_bad < 0:
        raise InvalidSpecError("shape counts must be non-negative")
    mix = _normalize_mix(defect_mix)
    counts = _mix_counts(n_bad, mix) if n_bad else {}

    plan: list[tuple[str, str | None]] = [("good", None)] * n_good
    for kind in DEFECT_KINDS:
        plan.extend([("bad", kind)] * counts.get(kind, 0))

    item_seeds = spawn_seeds(seed, len(plan))
    shapes: list[GeneratedShape] = []
    per_kind_counter: dict[str, int] = {}
    for (role, kind), item_seed in zip(plan, item_seeds):
        if role == "good":
            i = per_kind_counter.get("good", 0)
            per_kind_counter["good"] = i + 1
            sid = f"good_{i:04d}"
            mesh = generate_shape(True, None, item_seed)
            item = CorpusItem(
                id=sid,
                category=SourceCategory.USABLE,
                label=QualityLabel.GOOD,
                defect=None,
                seed=item_seed,
                mesh_path=f"meshes/{sid}.obj",
            )
        else:
            i = per_kind_counter.get(kind, 0)
            per_kind_counter[kind] = i + 1
            sid = f"bad_{_KIND_SHORT[kind]}_{i:04d}"
            shape_seed, defect_seed, mag_seed = spawn_seeds(item_seed, 3)
            lo, hi = MAGNITUDE_RANGES[kind]
            magnitude = float(rng_from_seed(mag_seed).uniform(lo, hi))
            defect = DefectSpec(kind, magnitude, defect_seed)
            mesh = generate_shape(False, defect, shape_seed)
            item = CorpusItem(
                id=sid,
                category=DEFECT_CATEGORY[kind],
                label=map_label(DEFECT_CATEGORY[kind]),
                defect=defect,
                seed=item_seed,
                mesh_path=f"meshes/{sid}.obj",
            )
        shapes.append(GeneratedShape(item, mesh))
    return shapes


def write_corpus(out_dir, n_good: int, n_bad: int, defect_mix=None, seed: int = 0) -> CorpusManifest:
    """Generate a corpus and write meshes plus manifest.json under out_dir."""
    out = Path(out_dir)
    (out / "meshes").mkdir(parents=True, exist_ok=True)
    shapes = generate_corpus(n_good, n_bad, defect_mix, seed)
    for gs in shapes:
        save_mesh(gs.mesh, out / gs.item.mesh_path)
    manifest = CorpusManifest(seed, tuple(gs.item for gs in shapes))
    manifest.save(out / "manifest.json")
    return manifest
