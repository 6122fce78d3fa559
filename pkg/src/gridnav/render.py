"""ASCII and SVG coverage maps drawn from a mission trace."""

from __future__ import annotations

from xml.sax.saxutils import escape

from .errors import InconsistentTrace
from .gridmap import Cell

GLYPHS = {
    "free": ".",
    "obstacle": "#",
    "path": "*",
    "replan": "x",
    "keypoint": "K",
    "origin": "O",
    "robot": "R",
}

LEGEND = (
    ("free", "free cell"),
    ("obstacle", "static obstacle"),
    ("path", "traversed"),
    ("replan", "replan point"),
    ("keypoint", "key point"),
    ("origin", "origin"),
    ("robot", "robot at end"),
)


def _check(trace, grid):
    for rec in trace.records:
        c = rec.cell
        if not grid.in_bounds(c):
            raise InconsistentTrace(f"tick {rec.tick}: cell {tuple(c)} is outside the map")
        if grid.blocked[c]:
            raise InconsistentTrace(f"tick {rec.tick}: cell {tuple(c)} is a static obstacle")


def replan_cells(trace):
    return [r.cell for r in trace.records if any(e.startswith("replan=") for e in r.events)]


def polyline(trace):
    """Traversed cells with consecutive duplicates removed."""
    out = []
    for c in trace.cells():
        if not out or out[-1] != c:
            out.append(c)
    return out


def render_ascii(trace, grid, keypoints=None):
    _check(trace, grid)
    canvas = [
        [GLYPHS["obstacle"] if b else GLYPHS["free"] for b in row] for row in grid.blocked
    ]

    def put(cell, kind):
        canvas[cell[0]][cell[1]] = GLYPHS[kind]

    for c in trace.cells():
        put(c, "path")
    for c in replan_cells(trace):
        put(c, "replan")
    if keypoints is not None:
        for c in keypoints.others:
            put(c, "keypoint")
        put(keypoints.origin, "origin")
    if trace.records:
        put(trace.records[-1].cell, "robot")
    lines = ["".join(row) for row in canvas]
    lines.append("")
    lines.append("  ".join(f"{GLYPHS[k]} {label}" for k, label in LEGEND))
    return "\n".join(lines) + "\n"


def render_svg(trace, grid, keypoints=None, scale=24):
    """SVG in the style of a dot-grid coverage map: black dots for free cells,
    blue dots for static obstacles, a polyline for the traversed route."""
    _check(trace, grid)
    width = grid.cols * scale
    legend_h = 3 * scale
    height = grid.rows * scale + legend_h

    def centre(cell):
        return cell[1] * scale + scale / 2, cell[0] * scale + scale / 2

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        '<g id="cells">',
    ]
    r = scale * 0.15
    for row in range(grid.rows):
        for col in range(grid.cols):
            x, y = centre((row, col))
            colour = "blue" if grid.blocked[row, col] else "black"
            kind = "obstacle" if grid.blocked[row, col] else "free"
            out.append(f'<circle class="{kind}" cx="{x:g}" cy="{y:g}" r="{r:g}" fill="{colour}"/>')
    out.append("</g>")

    line = polyline(trace)
    if len(line) > 1:
        pts = " ".join("{:g},{:g}".format(*centre(c)) for c in line)
        out.append(f'<polyline id="path" points="{pts}" fill="none" stroke="green" stroke-width="{scale * 0.12:g}"/>')

    out.append('<g id="replans">')
    for c in replan_cells(trace):
        x, y = centre(c)
        d = scale * 0.3
        out.append(
            f'<path class="replan" d="M{x - d:g},{y - d:g} L{x + d:g},{y + d:g} M{x - d:g},{y + d:g} '
            f'L{x + d:g},{y - d:g}" stroke="orange" stroke-width="2"/>'
        )
    out.append("</g>")

    out.append('<g id="keypoints">')
    if keypoints is not None:
        s = scale * 0.5
        for c in keypoints.cells:
            x, y = centre(c)
            kind = "origin" if c == keypoints.origin else "keypoint"
            fill = "gold" if kind == "origin" else "red"
            out.append(
                f'<rect class="{kind}" data-cell="{c[0]},{c[1]}" x="{x - s / 2:g}" y="{y - s / 2:g}" '
                f'width="{s:g}" height="{s:g}" fill="{fill}" fill-opacity="0.8"/>'
            )
    out.append("</g>")

    if trace.records:
        x, y = centre(trace.records[-1].cell)
        out.append(f'<circle id="robot" cx="{x:g}" cy="{y:g}" r="{scale * 0.3:g}" fill="none" stroke="purple" stroke-width="2"/>')

    y0 = grid.rows * scale + scale * 0.8
    items = (("black", "free"), ("blue", "obstacle"), ("green", "path"), ("red", "key point"), ("orange", "replan"))
    for k, (colour, label) in enumerate(items):
        x = 6 + k * max(width // len(items), 60)
        out.append(f'<circle cx="{x + 4}" cy="{y0:g}" r="4" fill="{colour}"/>')
        out.append(f'<text x="{x + 12}" y="{y0 + 4:g}" font-size="11" font-family="monospace">{escape(label)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def render_trace(trace, grid, style="ascii", keypoints=None):
    if style == "ascii":
        return render_ascii(trace, grid, keypoints)
    if style == "svg":
        return render_svg(trace, grid, keypoints)
    raise ValueError(f"unknown render style {style!r}")


def parse_ascii_glyphs(text):
    """Cells per glyph from an ASCII rendering (legend line excluded)."""
    found = {}
    for r, line in enumerate(text.split("\n\n")[0].splitlines()):
        for c, ch in enumerate(line):
            found.setdefault(ch, []).append(Cell(r, c))
    return found
