"""Named domain recipes for reproducible sweeps.

Each recipe turns a small JSON-able dict into a mesh plus a stable text
descriptor.  Outlines are rescaled so the polygon area matches the target
exactly (curved shapes are polygonalized at a fraction of the mesh size
first, so the shape error stays far below the discretization error).
"""

from __future__ import annotations

import math

import numpy as np

from .mesh import TriMesh, load_mesh, make_disk, make_polygon

__all__ = ["build_domain", "outline_for", "KINDS"]

KINDS = ("disk", "ellipse", "rectangle", "l-shape", "regular-n-gon", "mesh")

_L_SHAPE = np.array(
    [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.5, 1.0], [0.5, 0.5], [0.0, 0.5]]
)


def _shoelace(outline: np.ndarray) -> float:
    x, y = outline[:, 0], outline[:, 1]
    return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


def _rescaled(outline: np.ndarray, area: float) -> np.ndarray:
    return outline * math.sqrt(area / _shoelace(outline))


def _ellipse_outline(eccentricity: float, area: float, h: float) -> np.ndarray:
    if not 0.0 <= eccentricity < 1.0:
        raise ValueError(f"eccentricity must lie in [0, 1), got {eccentricity}")
    r0 = math.sqrt(area / math.pi)
    flat = (1.0 - eccentricity**2) ** 0.25
    a, b = r0 / flat, r0 * flat
    # Ramanujan perimeter; chords at ~2h/3 keep the sagitta near h^2/18
    # while staying clear of the mesher's boundary-to-lattice spacing
    perim = math.pi * (3.0 * (a + b) - math.sqrt((3.0 * a + b) * (a + 3.0 * b)))
    n = max(64, int(math.ceil(1.5 * perim / h)))
    theta = 2.0 * math.pi * np.arange(n) / n
    outline = np.column_stack([a * np.cos(theta), b * np.sin(theta)])
    return _rescaled(outline, area)


def outline_for(domain: dict, h: float):
    """(outline array or None, descriptor) for a domain dict.

    None means the recipe has its own mesher (the disk's concentric rings).
    """
    kind = domain.get("kind")
    if kind == "disk":
        area = float(domain.get("area", math.pi))
        return None, f"disk(area={area:.6g})"
    if kind == "ellipse":
        area = float(domain.get("area", math.pi))
        e = float(domain["eccentricity"])
        return _ellipse_outline(e, area, h), f"ellipse(e={e:.6g},area={area:.6g})"
    if kind == "rectangle":
        area = float(domain.get("area", math.pi))
        aspect = float(domain.get("aspect", 1.0))
        if not (aspect > 0.0 and math.isfinite(aspect)):
            raise ValueError(f"aspect must be positive, got {aspect}")
        w = math.sqrt(area * aspect)
        hh = math.sqrt(area / aspect)
        outline = np.array([[0.0, 0.0], [w, 0.0], [w, hh], [0.0, hh]])
        return _rescaled(outline, area), f"rectangle(aspect={aspect:.6g},area={area:.6g})"
    if kind == "l-shape":
        area = float(domain.get("area", math.pi))
        return _rescaled(_L_SHAPE, area), f"l-shape(area={area:.6g})"
    if kind == "regular-n-gon":
        area = float(domain.get("area", math.pi))
        sides = int(domain["sides"])
        if sides < 3:
            raise ValueError(f"a polygon needs at least 3 sides, got {sides}")
        theta = 2.0 * math.pi * (np.arange(sides) + 0.5) / sides
        outline = np.column_stack([np.cos(theta), np.sin(theta)])
        return _rescaled(outline, area), f"regular-{sides}-gon(area={area:.6g})"
    if kind == "mesh":
        return None, f"mesh:{domain['path']}"
    raise ValueError(f"unknown domain kind {kind!r}; expected one of {KINDS}")


def build_domain(domain: dict, h: float) -> tuple[TriMesh, str]:
    """Mesh a domain dict at target size h, returning (mesh, descriptor)."""
    if not (isinstance(h, (int, float)) and math.isfinite(h) and h > 0.0):
        raise ValueError(f"target mesh size must be positive, got {h!r}")
    kind = domain.get("kind")
    if kind == "disk":
        area = float(domain.get("area", math.pi))
        _, desc = outline_for(domain, h)
        return make_disk(math.sqrt(area / math.pi), h), desc
    if kind == "mesh":
        _, desc = outline_for(domain, h)
        return load_mesh(domain["path"]), desc
    outline, desc = outline_for(domain, h)
    return make_polygon(outline, h), desc
