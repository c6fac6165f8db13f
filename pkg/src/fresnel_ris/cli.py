"""Command-line experiment runners.

Every command reads an optional TOML scenario (defaults otherwise), writes
its result into ``--out`` and prints the written path.  CSV files open with
``#``-prefixed metadata lines holding the tool version, scenario hash, seed
and every resolved setting; JSON files carry the same under ``"meta"``.
"""

import csv
import io
import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import click
import numpy as np

from . import __version__
from .config import tposj
from .error import ErrorModel, configure, monte_carlo_se
from .exceptions import DegenerateFrameError, InfeasibleThresholdError, ScenarioError
from .field import Link
from .geometry import fraunhofer_array, fraunhofer_element
from .scenario import RUN_KEYS, Scenario, load_scenario
from .units import dbm_to_w

EXIT_SCENARIO = 2
EXIT_GEOMETRY = 3

DEFAULT_SIGMAS = (0.0, 0.01, 0.02, 0.05, 0.1, 0.2, 0.3, 0.5)
PATTERN_SYMBOLS = "+ = OFF (+gamma_r), − = ON (-gamma_r), · = absorb"


class Context:
    def __init__(self, scenario, run, seed, out, threads, fmt, source):
        self.scenario = scenario
        self.run = run
        self.seed = seed
        self.out = Path(out)
        self.threads = threads
        self.fmt = fmt
        self.source = source

    def meta(self, **extra):
        m = {
            "tool": f"fresnel-ris {__version__}",
            "scenario_source": self.source,
            "scenario_hash": self.scenario.digest(),
            "seed": self.seed,
            "error_sigma_convention": "per-axis standard deviation in the Tx-Rx B-frame",
        }
        m.update({f"scenario.{k}": v for k, v in self.scenario.to_dict().items()})
        m.update({f"run.{k}": v for k, v in self.run.items() if k != "seed"})
        m.update(extra)
        return m

    def write(self, stem, columns, rows, **extra):
        self.out.mkdir(parents=True, exist_ok=True)
        meta = self.meta(**extra)
        if self.fmt == "json":
            path = self.out / f"{stem}.json"
            doc = {"meta": meta, "columns": list(columns),
                   "rows": [dict(zip(columns, r)) for r in rows]}
            path.write_text(json.dumps(doc, indent=1, sort_keys=False) + "\n")
        else:
            path = self.out / f"{stem}.csv"
            buf = io.StringIO()
            for k, v in meta.items():
                buf.write(f"# {k}: {json.dumps(v)}\n")
            w = csv.writer(buf, lineterminator="\n")
            w.writerow(columns)
            for r in rows:
                w.writerow([_fmt(v) for v in r])
            path.write_text(buf.getvalue())
        click.echo(str(path))
        return path

    def pmap(self, fn, items):
        items = list(items)
        if self.threads > 1:
            with ThreadPoolExecutor(max_workers=self.threads) as pool:
                return list(pool.map(fn, items))
        return [fn(x) for x in items]


def _fmt(v):
    if isinstance(v, float):
        return repr(v)
    return v


def _floats(text):
    return [float(x) for x in text.split(",") if x.strip()]


@click.group()
@click.version_option(__version__)
@click.option("--scenario", "scenario_path", type=click.Path(dir_okay=False), default=None,
              help="TOML scenario file; defaults to the built-in 28 GHz scenario.")
@click.option("--seed", type=click.IntRange(0, 2 ** 64 - 1), default=None,
              help="Overrides the scenario's seed.")
@click.option("--out", type=click.Path(file_okay=False), default=".", show_default=True)
@click.option("--threads", type=click.IntRange(1, None), default=1, show_default=True)
@click.option("--format", "fmt", type=click.Choice(["csv", "json"]), default="csv",
              show_default=True)
@click.pass_context
def main(ctx, scenario_path, seed, out, threads, fmt):
    """Fresnel-zone RIS configuration experiments."""
    if scenario_path is None:
        scenario, run, source = Scenario(), dict(RUN_KEYS), "builtin"
    else:
        try:
            scenario, run = load_scenario(scenario_path)
        except ScenarioError as exc:
            click.echo(f"invalid scenario: {exc}", err=True)
            ctx.exit(EXIT_SCENARIO)
        source = Path(scenario_path).name
    if seed is not None:
        run["seed"] = seed
    ctx.obj = Context(scenario, run, run["seed"], out, threads, fmt, source)


def _guard(fn):
    """Map geometry failures to the documented exit code."""
    import functools

    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except (DegenerateFrameError, InfeasibleThresholdError) as exc:
            click.echo(f"infeasible geometry: {exc}", err=True)
            sys.exit(EXIT_GEOMETRY)
        except ScenarioError as exc:
            click.echo(f"invalid scenario: {exc}", err=True)
            sys.exit(EXIT_SCENARIO)
    return wrapper


@main.command()
@click.option("--error", "error_b", nargs=3, type=float, default=(0.0, 0.0, 0.0),
              show_default=True, help="Fixed Rx error (e_x e_y e_z) in metres, B-frame.")
@click.pass_obj
@_guard
def pattern(c, error_b):
    """TPOSJ configuration pattern as a symbol grid and per-element CSV."""
    from .error import error_to_world

    sc = c.scenario
    rx_est = sc.rx + error_to_world(np.array(error_b), sc)
    res = tposj(sc, rx=rx_est)
    rows = []
    for p, cfg in enumerate(res.configs):
        for m, n, re, im in cfg.csv_rows():
            rows.append((p, m, n, re, im, int(np.rint(re / sc.gamma_r)) if sc.gamma_r else 0))
        c.out.mkdir(parents=True, exist_ok=True)
        grid = c.out / f"pattern_panel{p}.txt"
        grid.write_text(cfg.to_text())
        click.echo(str(grid))
    extra = {"error_b_m": list(error_b), "symbols": PATTERN_SYMBOLS,
             "xi_m": [pr.xi for pr in res.pairs], "zone_bounds": [pr.bounds for pr in res.pairs]}
    c.write("pattern", ("panel", "m", "n", "re", "im", "state"), rows, **extra)


@main.command("sweep-power")
@click.option("--configurators", default="random,tposj,onebit,continuous", show_default=True)
@click.option("--random-draws", type=click.IntRange(1, None), default=100, show_default=True,
              help="Random configurations averaged per point.")
@click.pass_obj
@_guard
def sweep_power(c, configurators, random_draws):
    """SE versus transmit power for each configurator, NLoS and LoS."""
    sc, run = c.scenario, c.run
    names = [x.strip() for x in configurators.split(",") if x.strip()]
    powers = np.arange(run["p_dbm_min"], run["p_dbm_max"] + 1e-9, run["p_dbm_step"])
    link = Link(sc)
    rows = []
    for case, los in (("nlos", False), ("los", True)):
        scc = sc.replace(los=los)
        cfgs = {}
        for name in names:
            if name == "random":
                cfgs[name] = [configure(scc, "random", sc.rx, seed=[c.seed, k])
                              for k in range(random_draws)]
            else:
                cfgs[name] = [configure(scc, name, sc.rx)]
        for p_dbm in powers:
            pw = dbm_to_w(float(p_dbm))
            for name in names:
                se = [link.evaluate(cfg, los=los, tx_power_w=pw).se_bps_hz for cfg in cfgs[name]]
                rows.append((float(p_dbm), case, name, math.fsum(se) / len(se)))
    c.write("sweep_power", ("p_dbm", "case", "configurator", "se"), rows,
            random_draws=random_draws)


def _error_model(axes, sigma, seed):
    if axes == "xyz":
        return ErrorModel.isotropic(sigma, seed)
    return ErrorModel.single_axis(axes, sigma, seed)


@main.command("sweep-error")
@click.option("--axes", type=click.Choice(["xyz", "x", "y", "z"]), default="xyz",
              show_default=True)
@click.option("--sigmas", default=",".join(map(str, DEFAULT_SIGMAS)), show_default=True,
              help="Comma-separated per-axis standard deviations in metres.")
@click.option("--configurators", default="tposj,onebit", show_default=True)
@click.option("--trials", type=click.IntRange(1, None), default=None,
              help="Overrides the scenario's trial count.")
@click.pass_obj
@_guard
def sweep_error(c, axes, sigmas, configurators, trials):
    """Monte-Carlo SE versus Rx position error."""
    trials = trials or c.run["trials"]
    names = [x.strip() for x in configurators.split(",") if x.strip()]
    link = Link(c.scenario)
    rows = []
    for sigma in _floats(sigmas):
        for name in names:
            st = monte_carlo_se(c.scenario, name, _error_model(axes, sigma, c.seed), trials,
                                threads=c.threads, link=link)
            rows.append((sigma, axes, name, st.mean, st.std, st.q05, st.q50, st.q95, trials))
    c.write("sweep_error", ("sigma", "axes", "configurator", "mean_se", "std_se", "q05", "q50",
                            "q95", "trials"), rows, trials=trials)


@main.command("sweep-xi")
@click.option("--xi-over-lambda", "xis", default="0.1,0.2,0.3", show_default=True)
@click.option("--sigmas", default=",".join(map(str, DEFAULT_SIGMAS)), show_default=True)
@click.option("--trials", type=click.IntRange(1, None), default=None)
@click.pass_obj
@_guard
def sweep_xi(c, xis, sigmas, trials):
    """Monte-Carlo TPOSJ SE for fixed thresholds versus isotropic error."""
    trials = trials or c.run["trials"]
    sc = c.scenario
    link = Link(sc)
    xi_list = _floats(xis)
    rows = []
    for x in xi_list:
        for sigma in _floats(sigmas):
            st = monte_carlo_se(sc, "tposj", ErrorModel.isotropic(sigma, c.seed), trials,
                                threads=c.threads, xi=x * sc.lam, link=link)
            rows.append((x, sigma, st.mean, st.std, trials))
    c.write("sweep_xi", ("xi_over_lambda", "sigma", "mean_se", "std_se", "trials"), rows,
            xi_over_lambda=xi_list, trials=trials)


def _waypoints(text, run, scenario):
    if text:
        pts = [_floats(p) for p in text.split(";") if p.strip()]
    elif run.get("waypoints_m"):
        pts = run["waypoints_m"]
    else:
        # default: a 1 m walk along +y from the scenario's Rx
        pts = [scenario.rx.tolist(), (scenario.rx + np.array([0.0, 1.0, 0.0])).tolist()]
    pts = np.asarray(pts, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 3 or len(pts) < 1:
        raise ScenarioError("waypoints must be a list of 3-component points")
    return pts


def _along(pts, s):
    """Point at arc length ``s`` along a polyline (clamped to its end)."""
    seg = np.linalg.norm(np.diff(pts, axis=0), axis=1)
    for k, length in enumerate(seg):
        if s <= length or k == len(seg) - 1:
            if length == 0:
                return pts[k + 1].copy()
            return pts[k] + min(s, length) / length * (pts[k + 1] - pts[k])
        s -= length
    return pts[-1].copy()


@main.command()
@click.option("--waypoints", default=None, help='e.g. "-10,10,1.5;-10,11,1.5" (metres).')
@click.option("--speed-kmh", type=float, default=None)
@click.option("--slot-ms", type=float, default=None)
@click.option("--slots", type=click.IntRange(1, None), default=None)
@click.pass_obj
@_guard
def trajectory(c, waypoints, speed_kmh, slot_ms, slots):
    """Per-slot SE with a configuration one slot stale versus a fresh one."""
    sc, run = c.scenario, c.run
    speed = (run["speed_kmh"] if speed_kmh is None else speed_kmh) / 3.6
    slot = run["slot_ms"] if slot_ms is None else slot_ms
    n = run["slots"] if slots is None else slots
    pts = _waypoints(waypoints, run, sc)
    pos = [_along(pts, speed * k * slot * 1e-3) for k in range(n + 1)]
    cfgs = c.pmap(lambda p: tposj(sc, rx=p).configs, pos)

    def slot_row(k):
        link = Link(sc.with_rx(pos[k]))
        return (k * slot, link.evaluate(cfgs[k - 1]).se_bps_hz, link.evaluate(cfgs[k]).se_bps_hz)

    rows = c.pmap(slot_row, range(1, n + 1))
    c.write("trajectory", ("t_ms", "se_stale", "se_fresh"), rows, speed_mps=speed,
            slot_ms=slot, step_m=speed * slot * 1e-3, waypoints_m=pts.tolist())


@main.command()
@click.pass_obj
@_guard
def fraunhofer(c):
    """Element and array Fraunhofer distances and near/far classification."""
    sc = c.scenario
    lam = sc.lam
    rows = []
    for p, panel in enumerate(sc.panels):
        d_el = fraunhofer_element(panel.elem_a, panel.elem_b, lam)
        d_arr = fraunhofer_array(panel, lam)
        ends = [(f"tx{b}", t) for b, t in enumerate(sc.tx_antennas)] + [("rx", sc.rx)]
        for name, pt in ends:
            dist = float(np.linalg.norm(pt - panel.origin))
            rows.append((p, name, dist, d_el, d_arr,
                         "near" if dist < d_arr else "far",
                         "far" if dist > d_el else "near",
                         dist < 10 * d_el))
    c.write("fraunhofer", ("panel", "endpoint", "distance_m", "element_fraunhofer_m",
                           "array_fraunhofer_m", "array_field", "element_field",
                           "element_precondition_violated"), rows)
    for r in rows:
        click.echo(f"panel {r[0]} {r[1]}: {r[2]:.3f} m, {r[5]}-field of the array "
                   f"(d_F = {r[4]:.1f} m), {r[6]}-field of an element (d_F = {r[3]:.4f} m)"
                   + ("  [element far-field precondition violated]" if r[7] else ""))


if __name__ == "__main__":
    main()
