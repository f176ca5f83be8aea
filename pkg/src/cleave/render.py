"""SVG pictures of cleaving elements on S^1 (disk with chords) and S^2 (orthographic view)."""
from __future__ import annotations

import json
import math
from pathlib import Path
from xml.sax.saxutils import escape

import numpy as np

from .blueprint import blueprint, complement_components
from .operad import CleavageElement
from .regions import engine_for, face_extent, region_mask

PALETTE = ("#4e79a7", "#f28e2b", "#59a14f", "#e15759", "#b07aa1",
           "#76b7b2", "#edc948", "#9c755f", "#ff9da7", "#bab0ac")
STROKES = ("#111111", "#c0392b", "#1f618d", "#7d3c98", "#117864")
SIZE = 400
R = 170


def _xy(p) -> tuple[float, float]:
    return SIZE / 2 + R * float(p[0]), SIZE / 2 - R * float(p[1])


def _fmt(x: float) -> str:
    return f"{x:.2f}"


def _leaf_of(a: CleavageElement, pts: np.ndarray) -> np.ndarray:
    """Leaf label (0 = none) of each sample point on the sphere."""
    out = np.zeros(len(pts), dtype=int)
    for lab, T in enumerate(a.timber, start=1):
        m = np.ones(len(pts), dtype=bool)
        for c in T.constraints:
            m &= c.sign * (pts @ c.plane.nu - c.plane.offset) > 0
        out[m] = lab
    return out


def _timber_components(a: CleavageElement) -> int:
    eng = engine_for(a.n, a.rep.planes())
    return sum(eng.components(region_mask(eng, T))[0] for T in a.timber)


def _svg_s1(a: CleavageElement, B) -> list[str]:
    body = [f'<circle cx="{SIZE / 2}" cy="{SIZE / 2}" r="{R}" fill="none" stroke="#999" stroke-width="1"/>']
    steps = 1440
    th = 2 * math.pi * (np.arange(steps) + 0.5) / steps
    pts = np.column_stack([np.cos(th), np.sin(th)])
    lab = _leaf_of(a, pts)
    starts = np.flatnonzero(lab != np.roll(lab, 1))
    if len(starts) == 0:
        if lab[0]:
            body.append(f'<circle cx="{SIZE / 2}" cy="{SIZE / 2}" r="{R}" fill="none" '
                        f'stroke="{PALETTE[(lab[0] - 1) % len(PALETTE)]}" stroke-width="8" '
                        f'data-leaf="{lab[0]}"/>')
    for r, i in enumerate(starts):
        j = starts[(r + 1) % len(starts)]
        if not lab[i]:
            continue
        t0 = 2 * math.pi * i / steps
        span = 2 * math.pi * ((j - i) % steps) / steps
        p0 = _xy((math.cos(t0), math.sin(t0)))
        p1 = _xy((math.cos(t0 + span), math.sin(t0 + span)))
        large = 1 if span > math.pi else 0
        # SVG y points down, so counterclockwise on the page is sweep flag 0
        body.append(f'<path d="M {_fmt(p0[0])} {_fmt(p0[1])} A {R} {R} 0 {large} 0 '
                    f'{_fmt(p1[0])} {_fmt(p1[1])}" fill="none" '
                    f'stroke="{PALETTE[(lab[i] - 1) % len(PALETTE)]}" stroke-width="8" data-leaf="{lab[i]}"/>')
    for v, F in enumerate(B.faces):
        nu, p = F.carrier.nu, F.carrier.offset
        t = np.array([-nu[1], nu[0]])
        ext = face_extent(F, t)
        if ext is None:
            continue
        q0, q1 = _xy(p * nu + ext[0] * t), _xy(p * nu + ext[1] * t)
        comp = B.component_of[v]
        body.append(f'<line x1="{_fmt(q0[0])}" y1="{_fmt(q0[1])}" x2="{_fmt(q1[0])}" y2="{_fmt(q1[1])}" '
                    f'stroke="{STROKES[comp % len(STROKES)]}" stroke-width="3" '
                    f'data-vertex="{v + 1}" data-component="{comp}"/>')
    return body


def _svg_s2(a: CleavageElement, B) -> list[str]:
    body = []
    grid = 96
    cell = 2 * R / grid
    c, r = np.meshgrid(np.arange(grid), np.arange(grid))
    x = -1 + (c.ravel() + 0.5) * 2 / grid
    y = 1 - (r.ravel() + 0.5) * 2 / grid
    z2 = 1 - x * x - y * y
    vis = z2 > 0
    pts = np.column_stack([x[vis], y[vis], np.sqrt(z2[vis])])
    labs = _leaf_of(a, pts)
    for ci, ri, lab in zip(c.ravel()[vis], r.ravel()[vis], labs):
        if not lab:
            continue
        body.append(f'<rect x="{_fmt(SIZE / 2 - R + ci * cell)}" y="{_fmt(SIZE / 2 - R + ri * cell)}" '
                    f'width="{_fmt(cell + 0.05)}" height="{_fmt(cell + 0.05)}" '
                    f'fill="{PALETTE[(lab - 1) % len(PALETTE)]}" fill-opacity="0.55"/>')
    body.append(f'<circle cx="{SIZE / 2}" cy="{SIZE / 2}" r="{R}" fill="none" stroke="#333" stroke-width="1.5"/>')
    for v, F in enumerate(B.faces):
        nu, p = F.carrier.nu, F.carrier.offset
        if abs(p) >= 1:
            continue
        u = np.cross(nu, [1.0, 0, 0] if abs(nu[0]) < 0.9 else [0, 1.0, 0])
        u /= np.linalg.norm(u)
        w = np.cross(nu, u)
        rad = math.sqrt(1 - p * p)
        comp = B.component_of[v]
        colour = STROKES[comp % len(STROKES)]
        for front in (True, False):
            segs, cur = [], []
            for s in np.linspace(0, 2 * math.pi, 241):
                q = p * nu + rad * (math.cos(s) * u + math.sin(s) * w)
                if (q[2] >= 0) == front:
                    cur.append(_xy(q))
                elif cur:
                    segs.append(cur)
                    cur = []
            if cur:
                segs.append(cur)
            dash = "" if front else ' stroke-dasharray="4 3"'
            for seg in segs:
                if len(seg) < 2:
                    continue
                d = " ".join(f"{'M' if t == 0 else 'L'} {_fmt(x)} {_fmt(y)}" for t, (x, y) in enumerate(seg))
                body.append(f'<path d="{d}" fill="none" stroke="{colour}" stroke-width="2"{dash} '
                            f'data-vertex="{v + 1}" data-component="{comp}"/>')
    return body


def render_svg(a: CleavageElement, out: str | Path) -> dict:
    """Write the SVG and a JSON sidecar (out + '.json'); returns the sidecar data."""
    if a.n not in (1, 2):
        raise ValueError("rendering needs n in {1, 2}")
    B = blueprint(a)
    body = _svg_s1(a, B) if a.n == 1 else _svg_s2(a, B)
    meta = {"n": a.n, "k": a.arity, "timber_components": _timber_components(a),
            "blueprint_components": B.components, "complement_components": complement_components(a)}
    svg = ['<?xml version="1.0" encoding="UTF-8"?>',
           f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{SIZE}" height="{SIZE}" '
           f'viewBox="0 0 {SIZE} {SIZE}">',
           f'<desc>{escape(json.dumps(meta, sort_keys=True))}</desc>',
           f'<rect width="{SIZE}" height="{SIZE}" fill="white"/>', *body, '</svg>']
    out = Path(out)
    out.write_text("\n".join(svg) + "\n")
    Path(str(out) + ".json").write_text(json.dumps(meta, sort_keys=True) + "\n")
    return meta
