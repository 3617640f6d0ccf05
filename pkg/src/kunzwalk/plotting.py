"""SVG pictures of Kunz fans, drawn from FanGraph JSON only."""
from __future__ import annotations

import math
from pathlib import Path
from typing import Mapping

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

plt.rcParams["svg.fonttype"] = "none"  # keep labels as text
plt.rcParams["svg.hashsalt"] = "kunzwalk"  # deterministic element ids

TILDE = "∼"


def _fmt(v) -> str:
    return "(" + ",".join(str(c) for c in v) + ")"


def wall_label(facet: Mapping) -> str:
    return f"{_fmt(facet['outer_betti'])}{TILDE}{_fmt(facet['inner'])}"


def _chamber_names(fan: Mapping) -> dict[str, str]:
    return {ch["key"]: chr(ord("a") + i) if i < 26 else str(i)
            for i, ch in enumerate(fan["chambers"])}


def _unit(v):
    n = math.hypot(*v)
    return (v[0] / n, v[1] / n)


def plot_fan_2d(fan: Mapping, path: str | Path) -> Path:
    """Chambers as shaded wedges in the positive quadrant; interior walls labelled by their trade."""
    atoms = fan["atoms"]
    names = _chamber_names(fan)
    fig, ax = plt.subplots(figsize=(5, 5))
    cmap = plt.get_cmap("tab10")
    for i, ch in enumerate(fan["chambers"]):
        r1, r2 = (_unit(r) for r in ch["rays"])
        a1, a2 = sorted((math.atan2(r1[1], r1[0]), math.atan2(r2[1], r2[0])))
        ts = [a1 + (a2 - a1) * t / 32 for t in range(33)]
        xs = [0] + [math.cos(t) for t in ts]
        ys = [0] + [math.sin(t) for t in ts]
        ax.fill(xs, ys, color=cmap(i % 10), alpha=0.35, linewidth=0)
        mid = (a1 + a2) / 2
        ax.text(0.6 * math.cos(mid), 0.6 * math.sin(mid), f"({names[ch['key']]})",
                ha="center", va="center", fontsize=11)
    done = set()
    for ch in fan["chambers"]:
        for f in ch["facets"]:
            tight = [r for r in ch["rays"] if sum(a * b for a, b in zip(f["normal"], r)) == 0]
            u = _unit(tight[0])
            ax.plot([0, u[0]], [0, u[1]], color="black", linewidth=1)
            if f["kind"] != "interior":
                continue
            pair = tuple(sorted((ch["key"], f["neighbor"])))
            if pair in done:
                continue
            done.add(pair)
            ax.text(1.02 * u[0], 1.02 * u[1], wall_label(f), fontsize=8,
                    rotation=math.degrees(math.atan2(u[1], u[0])), rotation_mode="anchor")
    ax.set_xlim(0, 1.35)
    ax.set_ylim(0, 1.35)
    ax.set_aspect("equal")
    ax.set_xlabel(f"x_{atoms[0]}")
    ax.set_ylabel(f"x_{atoms[1]}")
    ax.set_title(f"G({fan['m']}; {', '.join(map(str, atoms))})")
    return _save(fig, path)


def _bary(v):
    s = sum(v)
    x, y, z = (c / s for c in v)
    return (y + z / 2, z * math.sqrt(3) / 2)


def plot_fan_3d(fan: Mapping, path: str | Path) -> Path:
    """Cross-section of a 3-dimensional fan with the plane ``x_1 + x_2 + x_3 = 1``."""
    atoms = fan["atoms"]
    names = _chamber_names(fan)
    fig, ax = plt.subplots(figsize=(6, 5.4))
    cmap = plt.get_cmap("tab20")
    tri = [_bary(v) for v in ((1, 0, 0), (0, 1, 0), (0, 0, 1))]
    ax.fill([p[0] for p in tri], [p[1] for p in tri], color="0.92", linewidth=0)
    for i, ch in enumerate(fan["chambers"]):
        pts = [_bary(r) for r in ch["rays"]]
        cx = sum(p[0] for p in pts) / len(pts)
        cy = sum(p[1] for p in pts) / len(pts)
        pts.sort(key=lambda p: math.atan2(p[1] - cy, p[0] - cx))
        ax.fill([p[0] for p in pts], [p[1] for p in pts], color=cmap(i % 20), alpha=0.6,
                edgecolor="black", linewidth=0.8)
        ax.text(cx, cy, f"({names[ch['key']]})", ha="center", va="center", fontsize=8)
    for p, a in zip(tri, atoms):
        ax.text(p[0], p[1], f"x_{a}", ha="center", va="bottom" if p[1] > 0 else "top", fontsize=9)
    ax.set_aspect("equal")
    ax.axis("off")
    ax.set_title(f"G({fan['m']}; {', '.join(map(str, atoms))}), {len(fan['chambers'])} chambers")
    return _save(fig, path)


def plot_fan(fan: Mapping, path: str | Path) -> Path:
    k = len(fan["atoms"])
    if k == 2:
        return plot_fan_2d(fan, path)
    if k == 3:
        return plot_fan_3d(fan, path)
    raise ValueError(f"plots exist for 2 or 3 atoms, not {k}")


def plot_facet_histogram(hist: Mapping[int, int], title: str, path: str | Path) -> Path:
    fig, ax = plt.subplots(figsize=(5, 3.5))
    keys = sorted(hist)
    ax.bar([str(k) for k in keys], [hist[k] for k in keys], color="tab:blue")
    ax.set_xlabel("facets per chamber")
    ax.set_ylabel("chambers")
    ax.set_title(title)
    return _save(fig, path)


def _save(fig, path) -> Path:
    path = Path(path)
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
    return path
