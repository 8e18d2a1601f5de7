"""Minimal line-chart SVG writer (no external renderer)."""

from xml.sax.saxutils import escape

WIDTH = 640
HEIGHT = 420
MARGIN_LEFT = 70
MARGIN_RIGHT = 170
MARGIN_TOP = 40
MARGIN_BOTTOM = 55

PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e")


def _ticks(lo, hi, count=5):
    if hi == lo:
        return [lo]
    step = (hi - lo) / (count - 1)
    return [lo + i * step for i in range(count)]


def _span(values):
    lo, hi = min(values), max(values)
    if hi == lo:
        pad = abs(lo) * 0.05 or 0.05
        return lo - pad, hi + pad
    pad = (hi - lo) * 0.05
    return lo - pad, hi + pad


def line_chart(x, series, title="", xlabel="", ylabel=""):
    """Render ``series`` (a list of ``(label, y_values)``) against ``x``.

    Coordinates are printed with fixed precision, so identical inputs give
    byte-identical output.
    """
    if not x or not series:
        raise ValueError("nothing to plot")
    x_lo, x_hi = _span(list(x))
    y_lo, y_hi = _span([v for _, ys in series for v in ys])
    pw = WIDTH - MARGIN_LEFT - MARGIN_RIGHT
    ph = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM

    def px(v):
        return MARGIN_LEFT + (v - x_lo) / (x_hi - x_lo) * pw

    def py(v):
        return MARGIN_TOP + (y_hi - v) / (y_hi - y_lo) * ph

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="#ffffff"/>',
        f'<text x="{WIDTH / 2:.2f}" y="22" text-anchor="middle" font-size="14">{escape(title)}</text>',
        f'<rect x="{MARGIN_LEFT}" y="{MARGIN_TOP}" width="{pw}" height="{ph}" '
        'fill="none" stroke="#000000"/>',
    ]
    for v in _ticks(x_lo, x_hi):
        xp = px(v)
        out.append(f'<line x1="{xp:.2f}" y1="{MARGIN_TOP + ph}" x2="{xp:.2f}" '
                   f'y2="{MARGIN_TOP + ph + 5}" stroke="#000000"/>')
        out.append(f'<text x="{xp:.2f}" y="{MARGIN_TOP + ph + 19}" '
                   f'text-anchor="middle">{v:.3f}</text>')
    for v in _ticks(y_lo, y_hi):
        yp = py(v)
        out.append(f'<line x1="{MARGIN_LEFT - 5}" y1="{yp:.2f}" x2="{MARGIN_LEFT}" '
                   f'y2="{yp:.2f}" stroke="#000000"/>')
        out.append(f'<line x1="{MARGIN_LEFT}" y1="{yp:.2f}" x2="{MARGIN_LEFT + pw}" '
                   f'y2="{yp:.2f}" stroke="#dddddd"/>')
        out.append(f'<text x="{MARGIN_LEFT - 8}" y="{yp + 4:.2f}" '
                   f'text-anchor="end">{v:.4f}</text>')
    out.append(f'<text x="{MARGIN_LEFT + pw / 2:.2f}" y="{HEIGHT - 12}" '
               f'text-anchor="middle">{escape(xlabel)}</text>')
    out.append(f'<text x="16" y="{MARGIN_TOP + ph / 2:.2f}" text-anchor="middle" '
               f'transform="rotate(-90 16 {MARGIN_TOP + ph / 2:.2f})">{escape(ylabel)}</text>')

    for idx, (label, ys) in enumerate(series):
        color = PALETTE[idx % len(PALETTE)]
        pts = " ".join(f"{px(a):.2f},{py(b):.2f}" for a, b in zip(x, ys))
        out.append(f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="2"/>')
        for a, b in zip(x, ys):
            out.append(f'<circle cx="{px(a):.2f}" cy="{py(b):.2f}" r="3" fill="{color}"/>')
        ly = MARGIN_TOP + 10 + idx * 20
        lx = MARGIN_LEFT + pw + 15
        out.append(f'<line x1="{lx}" y1="{ly}" x2="{lx + 25}" y2="{ly}" '
                   f'stroke="{color}" stroke-width="2"/>')
        out.append(f'<text x="{lx + 32}" y="{ly + 4}">{escape(label)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
