"""Synthetic benchmark: grid execution, resumable CSV output, report tables and plots."""

from __future__ import annotations

import csv
import io
import logging
import time
from collections import defaultdict
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Iterable, Iterator

import numpy as np

from .evaluation import edge_distances, edge_f1, model_distance
from .generation import DEFAULT_HORIZONS, DEFAULT_RATES, GenConfig, random_tgem
from .horizon import HorizonPolicy
from .learning import StructuralCaps, learn
from .sampling import sample

log = logging.getLogger(__name__)

SCHEMA = "# tgem-results v1"
EDGE_SCHEMA = "# tgem-edges v1"
RESULTS_FILE = "results.csv"
EDGES_FILE = "edges.csv"
TIMINGS_FILE = "timings.csv"

HEURISTICS = ("proximal", "q=0.05", "q=0.25", "q=0.5", "q=0.75", "q=0.95")

RESULT_COLUMNS = [
    "nodes", "density", "time_units", "replicate", "heuristic", "model_seed", "sample_seed",
    "true_edges", "learned_edges", "distance", "precision", "recall", "f1",
    "events_min", "events_median", "events_max", "bic_monotone", "status",
]
EDGE_COLUMNS = [
    "nodes", "density", "time_units", "replicate", "heuristic", "parent", "child",
    "true_endpoints", "horizon", "n_intervals", "learned_endpoints", "distance",
]
KEY_COLUMNS = ["nodes", "density", "time_units", "replicate", "heuristic"]


@dataclass
class BenchmarkConfig:
    nodes: list[int] = field(default_factory=lambda: [5, 10, 15])
    densities: list[float] = field(default_factory=lambda: [0.1, 0.2])
    time_units: list[float] = field(default_factory=lambda: [500, 1000, 2000, 4000, 8000])
    heuristics: list[str] = field(default_factory=lambda: list(HEURISTICS))
    replicates: int = 100
    seed_base: int = 0
    jobs: int = 1
    horizons: list[float] = field(default_factory=lambda: list(DEFAULT_HORIZONS))
    rates: list[float] = field(default_factory=lambda: list(DEFAULT_RATES))
    p_geom: float = 0.85
    max_indegree: int = 2
    max_intervals: int = 4
    per_edge: bool = False

    def __post_init__(self):
        if self.replicates < 1:
            raise ValueError("replicates must be >= 1")
        if self.jobs < 1:
            raise ValueError("jobs must be >= 1")
        for name in ("nodes", "densities", "time_units", "horizons", "rates"):
            values = getattr(self, name)
            if not values or min(values) <= 0:
                raise ValueError(f"{name} must be non-empty and positive")
        for h in self.heuristics:
            HorizonPolicy.from_name(h)

    @classmethod
    def from_toml(cls, path) -> "BenchmarkConfig":
        import tomli

        with open(path, "rb") as fh:
            raw = tomli.load(fh)
        known = {f.name for f in fields(cls)}
        unknown = set(raw) - known
        if unknown:
            raise ValueError(f"unknown benchmark config keys: {sorted(unknown)}")
        return cls(**raw)

    @property
    def n_units(self) -> int:
        return (
            len(self.nodes) * len(self.densities) * self.replicates
            * len(self.time_units) * len(self.heuristics)
        )


@dataclass(frozen=True)
class WorkUnit:
    nodes: int
    density: float
    time_units: float
    replicate: int
    heuristic: str
    seed_base: int

    @property
    def key(self) -> tuple[str, ...]:
        return (str(self.nodes), repr(float(self.density)), repr(float(self.time_units)),
                str(self.replicate), self.heuristic)

    def _seed(self, *extra: int) -> int:
        entropy = [self.seed_base, self.nodes, round(self.density * 10**6), self.replicate, *extra]
        return int(np.random.SeedSequence(entropy).generate_state(1, np.uint32)[0])

    @property
    def model_seed(self) -> int:
        return self._seed()

    @property
    def sample_seed(self) -> int:
        return self._seed(round(self.time_units * 10**3))


def work_units(config: BenchmarkConfig) -> list[WorkUnit]:
    return [
        WorkUnit(n, d, t, r, h, config.seed_base)
        for n in config.nodes
        for d in config.densities
        for r in range(config.replicates)
        for t in config.time_units
        for h in config.heuristics
    ]


def _fmt(x) -> str:
    if isinstance(x, bool):
        return str(int(x))
    if isinstance(x, float):
        return repr(x)
    return str(x)


def run_unit(unit: WorkUnit, config: BenchmarkConfig) -> tuple[list[str], list[list[str]], float]:
    """Run one (model, data length, heuristic) task; failures become error rows."""
    started = time.perf_counter()
    base = [unit.nodes, float(unit.density), float(unit.time_units), unit.replicate, unit.heuristic,
            unit.model_seed, unit.sample_seed]
    edge_rows = []
    try:
        truth = random_tgem(GenConfig(
            nodes=unit.nodes, density=unit.density, horizons=tuple(config.horizons),
            rates=tuple(config.rates), p_geom=config.p_geom, max_indegree=config.max_indegree,
            max_intervals_per_node=config.max_intervals, seed=unit.model_seed,
        ))
        stream = sample(truth, unit.time_units, unit.sample_seed)
        caps = StructuralCaps(config.max_indegree, config.max_intervals)
        learned, trace = learn(stream, HorizonPolicy.from_name(unit.heuristic), caps)
        scores = edge_f1(truth, learned)
        counts = np.array(list(stream.counts().values()))
        row = base + [
            len(truth.edges), len(learned.edges), model_distance(truth, learned),
            scores.precision, scores.recall, scores.f1,
            int(counts.min()), float(np.median(counts)), int(counts.max()),
            trace.is_monotone() and trace.final_bic >= trace.initial_bic["forward"],
            "ok",
        ]
        if config.per_edge:
            per_edge = edge_distances(truth, learned)
            for e in truth.edge_list():
                got = learned.edges.get((e.parent, e.child))
                edge_rows.append(base[:5] + [
                    e.parent, e.child, ";".join(map(repr, e.timescale.endpoints)),
                    e.timescale.horizon, len(e.timescale),
                    "" if got is None else ";".join(map(repr, got.endpoints)),
                    per_edge[(e.parent, e.child)],
                ])
    except Exception as exc:  # recorded, run continues
        log.exception("work unit %s failed", unit.key)
        msg = f"error: {type(exc).__name__}: {exc}".replace("\n", " ").replace(",", ";")
        row = base + [""] * (len(RESULT_COLUMNS) - len(base) - 1) + [msg]
        edge_rows = []
    elapsed = time.perf_counter() - started
    return [_fmt(v) for v in row], [[_fmt(v) for v in r] for r in edge_rows], elapsed


def _run_unit_star(args):
    return run_unit(*args)


def _read_rows(path: Path) -> list[list[str]]:
    """Complete data rows of a results-style CSV; a torn final line is dropped."""
    if not path.exists():
        return []
    text = path.read_text()
    if text and not text.endswith("\n"):
        text = text[: text.rfind("\n") + 1]
    lines = [ln for ln in text.splitlines() if ln and not ln.startswith("#")]
    return [row for row in csv.reader(lines[1:])]


def _rewrite(path: Path, schema: str, columns: list[str], rows: Iterable[list[str]]) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(schema + "\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        w.writerows(rows)


def run_benchmark(config: BenchmarkConfig, out_dir, jobs: int | None = None) -> Path:
    """Run every pending work unit, appending rows in work-unit order.

    Rows already present in ``out_dir`` are kept and their units skipped, so
    an interrupted run can be resumed. Runtimes go to a separate timings file
    so the results file is reproducible byte for byte.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    results_path = out / RESULTS_FILE
    edges_path = out / EDGES_FILE
    timings_path = out / TIMINGS_FILE

    done_rows = _read_rows(results_path)
    done = {tuple(r[:5]) for r in done_rows}
    _rewrite(results_path, SCHEMA, RESULT_COLUMNS, done_rows)
    if config.per_edge:
        kept = [r for r in _read_rows(edges_path) if tuple(r[:5]) in done]
        _rewrite(edges_path, EDGE_SCHEMA, EDGE_COLUMNS, kept)
    if not timings_path.exists():
        timings_path.write_text(",".join(KEY_COLUMNS + ["runtime_seconds"]) + "\n")

    pending = [u for u in work_units(config) if u.key not in done]
    log.info("%d work units, %d already done", config.n_units, config.n_units - len(pending))
    jobs = jobs or config.jobs
    args = [(u, config) for u in pending]
    if jobs == 1:
        outcomes: Iterator = map(_run_unit_star, args)
        pool = None
    else:
        pool = ProcessPoolExecutor(max_workers=jobs)
        outcomes = pool.map(_run_unit_star, args)
    try:
        with open(results_path, "a", newline="") as rf, open(timings_path, "a") as tf:
            ef = open(edges_path, "a", newline="") if config.per_edge else None
            rw = csv.writer(rf, lineterminator="\n")
            ew = csv.writer(ef, lineterminator="\n") if ef else None
            for unit, (row, edge_rows, elapsed) in zip(pending, outcomes):
                if ew is not None:
                    ew.writerows(edge_rows)
                    ef.flush()
                rw.writerow(row)
                rf.flush()
                tf.write(",".join(list(unit.key) + [f"{elapsed:.4f}"]) + "\n")
                tf.flush()
            if ef:
                ef.close()
    finally:
        if pool is not None:
            pool.shutdown()
    return results_path


# --------------------------------------------------------------------------- reports


def load_results(path) -> list[dict]:
    path = Path(path)
    if path.is_dir():
        path = path / RESULTS_FILE
    rows = _read_rows(path)
    if not rows:
        raise ValueError(f"no result rows in {path}")
    return [dict(zip(RESULT_COLUMNS, r)) for r in rows]


def fmt_num(x: float, digits: int = 2) -> str:
    """Round and drop trailing zeros: ``4.10 -> '4.1'``, ``3.0 -> '3'``."""
    s = f"{x:.{digits}f}"
    if "." in s:
        s = s.rstrip("0").rstrip(".")
    return "0" if s == "-0" else s


def mean_sd(values) -> tuple[float, float]:
    v = np.asarray(values, dtype=float)
    sd = float(np.std(v, ddof=1)) if len(v) > 1 else 0.0
    return float(np.mean(v)), sd


def _heuristic_order(names: Iterable[str]) -> list[str]:
    names = set(names)
    known = [h for h in HEURISTICS if h in names]
    return known + sorted(names - set(known))


def metric_table(rows: list[dict], metric: str) -> tuple[list[str], list[list[str]]]:
    """Mean (sd) of ``metric`` per setting and heuristic, plus the empty-model baseline."""
    ok = [r for r in rows if r["status"] == "ok"]
    heuristics = _heuristic_order(r["heuristic"] for r in ok)
    cells = defaultdict(list)
    baseline = defaultdict(dict)
    for r in ok:
        setting = (int(r["nodes"]), float(r["density"]), float(r["time_units"]))
        cells[setting + (r["heuristic"],)].append(float(r[metric]))
        baseline[setting][r["replicate"]] = float(r["true_edges"] if metric == "distance" else 0.0)
    header = ["Nodes", "Time Units", "Density", "N"] + heuristics + ["empty"]
    body = []
    for setting in sorted(baseline, key=lambda s: (s[0], s[1], s[2])):
        n = max(len(cells[setting + (h,)]) for h in heuristics)
        line = [str(setting[0]), fmt_num(setting[2]), fmt_num(setting[1]), str(n)]
        for h in heuristics:
            vals = cells[setting + (h,)]
            if vals:
                m, sd = mean_sd(vals)
                line.append(f"{fmt_num(m)} ({fmt_num(sd)})")
            else:
                line.append("")
        m, sd = mean_sd(list(baseline[setting].values()))
        line.append(f"{fmt_num(m)} ({fmt_num(sd)})")
        body.append(line)
    return header, body


def events_table(rows: list[dict]) -> tuple[list[str], list[list[str]]]:
    """Average min/median/max per-label event counts per data length."""
    per_dataset = {}
    for r in rows:
        if r["status"] != "ok":
            continue
        key = (r["nodes"], r["density"], r["replicate"], r["time_units"])
        per_dataset[key] = (float(r["events_min"]), float(r["events_median"]), float(r["events_max"]))
    by_t = defaultdict(list)
    for (_, _, _, t), v in per_dataset.items():
        by_t[float(t)].append(v)
    header = ["Sampled Time Units", "Avg. Min", "Avg. Median", "Avg. Max"]
    body = []
    for t in sorted(by_t):
        avg = np.mean(np.array(by_t[t]), axis=0)
        body.append([fmt_num(t)] + [str(int(round(v))) for v in avg])
    return header, body


def render_text(header: list[str], body: list[list[str]]) -> str:
    widths = [max(len(str(c)) for c in col) for col in zip(header, *body)]
    lines = ["  ".join(str(c).rjust(w) for c, w in zip(row, widths)) for row in [header] + body]
    lines.insert(1, "  ".join("-" * w for w in widths))
    return "\n".join(lines) + "\n"


def render_csv(header: list[str], body: list[list[str]]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(body)
    return buf.getvalue()


def summarize(results, out_dir=None) -> dict[str, tuple[list[str], list[list[str]]]]:
    """Distance, F1 and event-count tables; written as CSV and text when ``out_dir`` is set."""
    rows = load_results(results) if not isinstance(results, list) else results
    if not rows:
        raise ValueError("empty results")
    tables = {
        "distance": metric_table(rows, "distance"),
        "f1": metric_table(rows, "f1"),
        "events": events_table(rows),
    }
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        for name, (header, body) in tables.items():
            (out / f"{name}.csv").write_text(render_csv(header, body))
            (out / f"{name}.txt").write_text(render_text(header, body))
    return tables


QUANTILE_COLUMNS = ["timescale", "horizon", "time_units", "count", "min", "q1", "median", "q3", "max"]


def distance_by_horizon(results_dir, out_dir=None, heuristic: str = "proximal", svg: bool = True):
    """Quantiles of per-edge refined distances by true horizon, data length and timescale kind."""
    path = Path(results_dir) / EDGES_FILE
    if not path.exists():
        raise FileNotFoundError(f"{path} not found; run the benchmark with per-edge output")
    groups = defaultdict(list)
    for r in _read_rows(path):
        rec = dict(zip(EDGE_COLUMNS, r))
        if rec["heuristic"] != heuristic:
            continue
        kind = "single" if int(rec["n_intervals"]) == 1 else "multiple"
        groups[(kind, float(rec["horizon"]), float(rec["time_units"]))].append(float(rec["distance"]))
    body = []
    for (kind, h, t) in sorted(groups, key=lambda k: (k[0] != "single", k[1], k[2])):
        q = np.quantile(groups[(kind, h, t)], [0, 0.25, 0.5, 0.75, 1])
        body.append([kind, fmt_num(h), fmt_num(t), str(len(groups[(kind, h, t)]))] + [fmt_num(v, 4) for v in q])
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / "distance_by_horizon.csv").write_text(render_csv(QUANTILE_COLUMNS, body))
        if svg:
            for kind in ("single", "multiple"):
                rows = [b for b in body if b[0] == kind]
                if rows:
                    (out / f"distance_by_horizon_{kind}.svg").write_text(boxplot_svg(rows, kind))
    return QUANTILE_COLUMNS, body


def boxplot_svg(rows: list[list[str]], title: str) -> str:
    """Standalone SVG box plots, one box per (horizon, data length) row."""
    width, height, pad = max(320, 40 * len(rows) + 80), 300, 50
    plot_h = height - 2 * pad

    def y(v: float) -> float:
        return height - pad - v * plot_h

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">',
        f'<text x="{width / 2}" y="20" text-anchor="middle" font-size="13">'
        f"distance per horizon ({title} interval timescales)</text>",
        f'<line x1="{pad}" y1="{y(0)}" x2="{pad}" y2="{y(1)}" stroke="black"/>',
    ]
    for tick in (0, 0.25, 0.5, 0.75, 1):
        parts.append(f'<text x="{pad - 6}" y="{y(tick) + 4}" text-anchor="end" font-size="10">{tick}</text>')
    for i, row in enumerate(rows):
        lo, q1, med, q3, hi = (float(v) for v in row[4:9])
        cx = pad + 30 + 40 * i
        parts += [
            f'<line x1="{cx}" y1="{y(lo)}" x2="{cx}" y2="{y(hi)}" stroke="black"/>',
            f'<rect x="{cx - 12}" y="{y(q3)}" width="24" height="{max(y(q1) - y(q3), 0.5)}" '
            f'fill="#9ecae1" stroke="black"/>',
            f'<line x1="{cx - 12}" y1="{y(med)}" x2="{cx + 12}" y2="{y(med)}" stroke="black" stroke-width="2"/>',
            f'<text x="{cx}" y="{height - pad + 14}" text-anchor="middle" font-size="9">h={row[1]}</text>',
            f'<text x="{cx}" y="{height - pad + 26}" text-anchor="middle" font-size="9">T={row[2]}</text>',
        ]
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def report(results_dir, out_dir) -> None:
    summarize(results_dir, out_dir)
    if (Path(results_dir) / EDGES_FILE).exists():
        distance_by_horizon(results_dir, out_dir)
