"""Self-contained SVG charts: on-hand time series and the cost/service frontier."""

from __future__ import annotations

from pathlib import Path
from xml.sax.saxutils import escape

from .experiments import FrontierPoint
from .model import ROLES, DayRecord, Role

WIDTH, HEIGHT = 720, 400
MARGIN = {"left": 70, "right": 150, "top": 40, "bottom": 50}
COLORS = {
    Role.SUPPLIER: "#2ca02c",
    Role.MANUFACTURER: "#1f77b4",
    Role.RETAILER: "#ff7f0e",
}


def _nice_max(value: float) -> float:
    if value <= 0:
        return 1.0
    magnitude = 10 ** (len(str(int(value))) - 1)
    for step in (1, 2, 5, 10):
        if value <= step * magnitude:
            return float(step * magnitude)
    return float(10 * magnitude)


def _fmt(v: float) -> str:
    return f"{v:.1f}".rstrip("0").rstrip(".")


def _header(title: str) -> list[str]:
    return [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">',
        f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<text x="{WIDTH / 2}" y="22" text-anchor="middle" font-size="15">{escape(title)}</text>',
    ]


class _Axes:
    def __init__(self, x_range: tuple[float, float], y_range: tuple[float, float]):
        self.x0, self.x1 = x_range
        self.y0, self.y1 = y_range
        self.left = MARGIN["left"]
        self.right = WIDTH - MARGIN["right"]
        self.top = MARGIN["top"]
        self.bottom = HEIGHT - MARGIN["bottom"]

    def x(self, v: float) -> float:
        span = (self.x1 - self.x0) or 1.0
        return self.left + (v - self.x0) / span * (self.right - self.left)

    def y(self, v: float) -> float:
        span = (self.y1 - self.y0) or 1.0
        return self.bottom - (v - self.y0) / span * (self.bottom - self.top)

    def frame(self, x_label: str, y_label: str, ticks: int = 5) -> list[str]:
        out = [
            f'<line x1="{self.left}" y1="{self.bottom}" x2="{self.right}" y2="{self.bottom}" stroke="black"/>',
            f'<line x1="{self.left}" y1="{self.top}" x2="{self.left}" y2="{self.bottom}" stroke="black"/>',
        ]
        for i in range(ticks + 1):
            xv = self.x0 + (self.x1 - self.x0) * i / ticks
            yv = self.y0 + (self.y1 - self.y0) * i / ticks
            px, py = self.x(xv), self.y(yv)
            out.append(f'<line x1="{px:.1f}" y1="{self.bottom}" x2="{px:.1f}" y2="{self.bottom + 5}" stroke="black"/>')
            out.append(f'<text x="{px:.1f}" y="{self.bottom + 18}" text-anchor="middle">{_fmt(xv)}</text>')
            out.append(f'<line x1="{self.left - 5}" y1="{py:.1f}" x2="{self.left}" y2="{py:.1f}" stroke="black"/>')
            out.append(f'<text x="{self.left - 8}" y="{py + 4:.1f}" text-anchor="end">{_fmt(yv)}</text>')
        mid_x = (self.left + self.right) / 2
        mid_y = (self.top + self.bottom) / 2
        out.append(f'<text x="{mid_x}" y="{HEIGHT - 12}" text-anchor="middle">{escape(x_label)}</text>')
        out.append(f'<text x="18" y="{mid_y}" text-anchor="middle" '
                   f'transform="rotate(-90 18 {mid_y})">{escape(y_label)}</text>')
        return out


def timeseries_svg(trace: list[DayRecord], title: str = "On-hand inventory",
                   window: tuple[int, int] | None = None,
                   roles: tuple[Role, ...] = ROLES) -> str:
    if not trace:
        raise ValueError("cannot chart an empty trace")
    series = {role: [(r.day, r.on_hand) for r in trace if r.entity is role] for role in roles}
    days = [r.day for r in trace]
    first, last = min(days), max(days)
    top = _nice_max(max(r.on_hand for r in trace if r.entity in roles))
    axes = _Axes((first, max(last, first + 1)), (0, top))
    out = _header(title)
    if window is not None:
        start, end = (max(window[0], first), min(window[1], last + 1))
        if start < end:
            x0, x1 = axes.x(start), axes.x(end)
            out.append(f'<rect class="disruption" x="{x0:.1f}" y="{axes.top}" width="{x1 - x0:.1f}" '
                       f'height="{axes.bottom - axes.top}" fill="#d62728" fill-opacity="0.12"/>')
    out += axes.frame("day", "units on hand")
    for i, role in enumerate(roles):
        points = series[role]
        if not points:
            continue
        coords = " ".join(f"{axes.x(d):.1f},{axes.y(v):.1f}" for d, v in points)
        out.append(f'<polyline class="series" data-entity="{role.value}" points="{coords}" '
                   f'fill="none" stroke="{COLORS[role]}" stroke-width="1.5"/>')
        ly = axes.top + 14 + 18 * i
        out.append(f'<line x1="{axes.right + 15}" y1="{ly}" x2="{axes.right + 35}" y2="{ly}" '
                   f'stroke="{COLORS[role]}" stroke-width="2"/>')
        out.append(f'<text x="{axes.right + 40}" y="{ly + 4}">{role.value}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def frontier_svg(points: list[FrontierPoint], title: str = "Cost / service trade-off") -> str:
    if points:
        costs = [p.total_cost for p in points]
        lo, hi = min(costs), max(costs)
        pad = (hi - lo) * 0.15 or max(hi * 0.05, 1.0)
        x_range = (lo - pad, hi + pad)
        y_lo = min(p.service_level for p in points)
        y_range = (max(0.0, min(y_lo - 5, 90.0)), 100.0)
    else:
        x_range, y_range = (0.0, 1.0), (0.0, 100.0)
    axes = _Axes(x_range, y_range)
    out = _header(title)
    out += axes.frame("total cost", "service level (%)")
    for i, p in enumerate(points):
        px, py = axes.x(p.total_cost), axes.y(p.service_level)
        # alternate above/below so neighbouring labels don't collide
        dy = -12 - 16 * (i % 3)
        fill = "#999999" if p.dominated else "#1f77b4"
        out.append(f'<circle class="point" cx="{px:.1f}" cy="{py:.1f}" r="6" fill="{fill}"/>')
        label = f"{p.strategy_name} ({p.cost_rating.label} cost, {p.speed_rating.label})"
        out.append(f'<text class="label" x="{px:.1f}" y="{py + dy:.1f}" text-anchor="middle">'
                   f'{escape(label)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def render_charts(data: list[DayRecord] | list[FrontierPoint], kind: str,
                  out: str | Path, **kwargs) -> Path:
    if kind == "timeseries":
        svg = timeseries_svg(data, **kwargs)
    elif kind == "frontier":
        svg = frontier_svg(data, **kwargs)
    else:
        raise ValueError(f"unknown chart kind {kind!r}")
    path = Path(out)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(svg, encoding="utf-8")
    return path
