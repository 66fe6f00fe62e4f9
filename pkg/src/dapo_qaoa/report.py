"""SVG charts and a plain-text summary from records CSVs."""

from __future__ import annotations

from collections import defaultdict
from pathlib import Path
from statistics import mean
from typing import Sequence
from xml.sax.saxutils import escape

from .records import algo_rank, read_records

RATIO_AXIS = (0.0, 1.05)
RATIO_TOLERANCE = 1e-9
PALETTE = ("#d62728", "#1f77b4", "#e6a700", "#7f7f7f", "#2ca02c", "#9467bd", "#8c564b", "#17becf")

W, H = 640, 400
ML, MR, MT, MB = 60, 170, 40, 50


def _sx(x, x0, x1):
    return ML + (x - x0) / ((x1 - x0) or 1) * (W - ML - MR)


def _sy(y, y0, y1):
    return H - MB - (y - y0) / ((y1 - y0) or 1) * (H - MT - MB)


def _frame(title: str, xlabel: str, ylabel: str, x0, x1, y0, y1, xticks) -> list[str]:
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" font-family="sans-serif" font-size="12">',
        f'<rect width="{W}" height="{H}" fill="white"/>',
        f'<text x="{W / 2:.1f}" y="20" text-anchor="middle" font-size="14">{escape(title)}</text>',
        f'<line x1="{ML}" y1="{H - MB}" x2="{W - MR}" y2="{H - MB}" stroke="black"/>',
        f'<line x1="{ML}" y1="{MT}" x2="{ML}" y2="{H - MB}" stroke="black"/>',
        f'<text x="{(ML + W - MR) / 2:.1f}" y="{H - 12}" text-anchor="middle">{escape(xlabel)}</text>',
        f'<text x="16" y="{(MT + H - MB) / 2:.1f}" text-anchor="middle" '
        f'transform="rotate(-90 16 {(MT + H - MB) / 2:.1f})">{escape(ylabel)}</text>',
    ]
    for xt in xticks:
        px = _sx(xt, x0, x1)
        out.append(f'<text x="{px:.1f}" y="{H - MB + 16}" text-anchor="middle">{xt}</text>')
    for k in range(6):
        yt = y0 + (y1 - y0) * k / 5
        py = _sy(yt, y0, y1)
        out.append(f'<line x1="{ML - 4}" y1="{py:.1f}" x2="{ML}" y2="{py:.1f}" stroke="black"/>')
        out.append(f'<text x="{ML - 6}" y="{py + 4:.1f}" text-anchor="end">{yt:.3g}</text>')
    return out


def _legend(labels: Sequence[str]) -> list[str]:
    out = []
    for k, label in enumerate(labels):
        y = MT + 10 + 18 * k
        color = PALETTE[k % len(PALETTE)]
        out.append(f'<rect x="{W - MR + 10}" y="{y - 9}" width="12" height="12" fill="{color}"/>')
        out.append(f'<text x="{W - MR + 28}" y="{y + 1}" class="legend">{escape(label)}</text>')
    return out


def line_chart(series: dict[str, list[tuple[float, float]]], title: str, xlabel: str,
               ylabel: str, y_range: tuple[float, float] | None = None) -> str:
    """Polyline chart; series are drawn and listed in the dict's order."""
    xs = [x for pts in series.values() for x, _ in pts]
    ys = [y for pts in series.values() for _, y in pts]
    x0, x1 = (min(xs), max(xs)) if xs else (0, 1)
    if y_range is not None:
        y0, y1 = y_range
    else:
        y0, y1 = (min(ys), max(ys)) if ys else (0, 1)
        pad = 0.05 * ((y1 - y0) or 1)
        y0, y1 = y0 - pad, y1 + pad
    out = _frame(title, xlabel, ylabel, x0, x1, y0, y1, sorted(set(int(x) for x in xs)))
    for k, (label, pts) in enumerate(series.items()):
        color = PALETTE[k % len(PALETTE)]
        clamped = [(x, min(max(y, y0), y1)) for x, y in pts]
        coords = " ".join(f"{_sx(x, x0, x1):.1f},{_sy(y, y0, y1):.1f}" for x, y in clamped)
        out.append(f'<polyline class="series" data-label="{escape(label)}" fill="none" '
                   f'stroke="{color}" stroke-width="2" points="{coords}"/>')
    out += _legend(list(series))
    out.append("</svg>")
    return "\n".join(out) + "\n"


def bar_chart(bars: list[tuple[int, float]], title: str, xlabel: str, ylabel: str) -> str:
    xs = [x for x, _ in bars] or [0]
    ys = [y for _, y in bars] or [0]
    x0, x1 = min(xs) - 0.5, max(xs) + 0.5
    y0, y1 = min(0.0, min(ys)), max(ys) or 1.0
    out = _frame(title, xlabel, ylabel, x0, x1, y0, y1, sorted(set(xs)))
    width = 0.7 * (W - ML - MR) / max(1, len(xs))
    for x, y in bars:
        px = _sx(x, x0, x1) - width / 2
        top, base = _sy(max(y, 0), y0, y1), _sy(min(y, 0), y0, y1)
        out.append(f'<rect class="bar" x="{px:.1f}" y="{top:.1f}" width="{width:.1f}" '
                   f'height="{base - top:.1f}" fill="{PALETTE[0]}"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _mean_by_depth(rows: list[dict], column: str) -> list[tuple[int, float]]:
    acc: dict[int, list[float]] = defaultdict(list)
    for r in rows:
        if r[column] != "":
            acc[int(r["p"])].append(float(r[column]))
    return [(p, mean(v)) for p, v in sorted(acc.items())]


def build_report(record_files: Sequence[Path], out_dir: Path) -> list[Path]:
    """Write per-instance charts and ``summary.txt`` into ``out_dir``."""
    rows = []
    for f in record_files:
        rows += read_records(f)
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    by_inst: dict[str, dict[str, list[dict]]] = defaultdict(lambda: defaultdict(list))
    for r in rows:
        by_inst[r["instance"]][r["algo"]].append(r)

    written: list[Path] = []
    summary = ["instance\talgo\tp\tfinal_ratio\tfinal_F\trzz_cum"]
    errors = []
    for inst in sorted(by_inst):
        algos = sorted(by_inst[inst], key=lambda a: (algo_rank(a), a))
        has_ratio = any(r["ratio"] != "" for a in algos for r in by_inst[inst][a])
        if has_ratio:
            series = {a: _mean_by_depth(by_inst[inst][a], "ratio") for a in algos}
            svg = line_chart(series, f"{inst}: approximation ratio", "layers p", "ratio", RATIO_AXIS)
            path = out_dir / f"{inst}_ratio.svg"
        else:
            series = {a: _mean_by_depth(by_inst[inst][a], "F") for a in algos}
            svg = line_chart(series, f"{inst}: energy", "layers p", "energy")
            path = out_dir / f"{inst}_energy.svg"
        path.write_text(svg, encoding="utf-8")
        written.append(path)

        if "dapo" in by_inst[inst] and "vanilla" in by_inst[inst]:
            dapo = dict(_mean_by_depth(by_inst[inst]["dapo"], "rzz_cum"))
            van = dict(_mean_by_depth(by_inst[inst]["vanilla"], "rzz_cum"))
            bars = [(p, van[p] - dapo[p]) for p in sorted(set(dapo) & set(van))]
            path = out_dir / f"{inst}_rzz_reduction.svg"
            path.write_text(bar_chart(bars, f"{inst}: R_ZZ saved vs vanilla", "layers p",
                                      "cumulative R_ZZ reduction"), encoding="utf-8")
            written.append(path)

        for a in algos:
            rs = by_inst[inst][a]
            p_max = max(int(r["p"]) for r in rs)
            final = [r for r in rs if int(r["p"]) == p_max]
            ratios = [float(r["ratio"]) for r in final if r["ratio"] != ""]
            ratio_txt = f"{mean(ratios):.6f}" if ratios else "-"
            summary.append(f"{inst}\t{a}\t{p_max}\t{ratio_txt}\t"
                           f"{mean(float(r['F']) for r in final):.6f}\t"
                           f"{mean(int(r['rzz_cum']) for r in final):.1f}")
            for r in rs:
                if r["ratio"] != "" and float(r["ratio"]) > 1 + RATIO_TOLERANCE:
                    errors.append(f"ERROR ratio > 1: {inst} {a} seed={r['seed']} p={r['p']} "
                                  f"ratio={r['ratio']}")
    text = "\n".join(summary + ([""] + errors if errors else [])) + "\n"
    path = out_dir / "summary.txt"
    path.write_text(text, encoding="utf-8")
    written.append(path)
    return written
