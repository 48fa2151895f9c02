"""Command-line interface: ``qchaos <command> [options]``.

Exit codes: 0 success, 2 invalid arguments, 3 computation failure, 4 I/O failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from . import atlas, cache, classical, core, spectral
from .errors import BandError, CacheError, InvalidArgumentError, QChaosError
from .tables import write_table

log = logging.getLogger("qchaos")

EXIT_OK, EXIT_ARGS, EXIT_COMPUTE, EXIT_IO = 0, 2, 3, 4
CACHE_ENV = "QBOX_CACHE_DIR"

FIGURES = {
    "fig2a": {"eps": [0.006]},
    "fig2b": {"eps": [0.02]},
    "fig2c": {"eps": [0.06]},
    "fig3": {"eps": [0.02, 0.02, 0.02, 0.06], "anchors": [(16, 42), (20, 40), (11, 41), (15, 41)]},
    "fig4": {"eps": list(np.logspace(-5, -1, 17))},
}
FIG3_PANELS = "abcd"
FIG3_QUOTED_MAX = (0.614, 0.315, 0.194, 0.070)


@dataclass(frozen=True)
class RunConfig:
    nmax: int = 100
    eps: tuple[float, ...] = (0.02,)
    band: tuple[float, float] = (37.1, 52.0)
    mmax_min: float = atlas.DEFAULT_MMAX_MIN
    out: Path = Path("qchaos-out")
    cache: Path = Path(".qchaos-cache")
    seed: int = 0
    format: str = "csv"

    def __post_init__(self):
        if int(self.nmax) != self.nmax or self.nmax < 2:
            raise InvalidArgumentError(f"nmax must be an integer >= 2, got {self.nmax}")
        for e in self.eps:
            if not 0.0 <= e < 1.0:
                raise InvalidArgumentError(f"eps values must lie in [0, 1), got {e}")
        if not self.band[1] > self.band[0]:
            raise InvalidArgumentError(f"band must be nonempty, got {self.band}")
        if self.mmax_min <= 0:
            raise InvalidArgumentError("mmaxmin must be positive")
        if self.format not in ("csv", "json"):
            raise InvalidArgumentError(f"format must be csv or json, got {self.format}")


def _floats(text) -> tuple[float, ...]:
    return tuple(float(v) for v in str(text).replace(",", " ").split())


def _pair(text) -> tuple[int, int]:
    a, b = str(text).replace(",", " ").split()
    return int(a), int(b)


CONFIG_KEYS = {
    "nmax": int,
    "eps": _floats,
    "band": _floats,
    "mmaxmin": float,
    "mmax_min": float,
    "seed": int,
    "out": Path,
    "cache": Path,
    "format": str,
}


def read_config_file(path) -> dict:
    """Plain ``key = value`` lines; ``#`` starts a comment."""
    values = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise InvalidArgumentError(f"{path}:{lineno}: expected key = value")
        key, val = (s.strip() for s in line.split("=", 1))
        if key not in CONFIG_KEYS:
            raise InvalidArgumentError(f"{path}:{lineno}: unknown key {key!r}")
        try:
            values["mmax_min" if key == "mmaxmin" else key] = CONFIG_KEYS[key](val)
        except ValueError as exc:
            raise InvalidArgumentError(f"{path}:{lineno}: {exc}") from exc
    return values


def build_config(args) -> RunConfig:
    values = {}
    if getattr(args, "config", None):
        values.update(read_config_file(args.config))
    for name, key in [("nmax", "nmax"), ("eps", "eps"), ("band", "band"), ("mmaxmin", "mmax_min"),
                      ("seed", "seed"), ("out", "out"), ("cache", "cache"), ("format", "format")]:
        if getattr(args, name, None) is not None:
            values[key] = getattr(args, name)
    if "band" in values and len(values["band"]) != 2:
        raise InvalidArgumentError("band takes two numbers")
    if os.environ.get(CACHE_ENV):
        values["cache"] = Path(os.environ[CACHE_ENV])
    for key in ("out", "cache"):
        if key in values:
            values[key] = Path(values[key])
    if "eps" in values:
        values["eps"] = tuple(values["eps"])
    if "band" in values:
        values["band"] = tuple(values["band"])
    return RunConfig(**values)


# -- spectra -----------------------------------------------------------------


def get_spectrum(cfg: RunConfig, eps: float, basis: core.Basis | None = None):
    """Load the spectrum from cache or compute and store it."""
    basis = basis or core.enumerate_basis(cfg.nmax)
    try:
        hit = cache.load(cfg.cache, cfg.nmax, eps)
    except CacheError as exc:
        log.warning("discarding cache entry for nmax=%d eps=%r: %s", cfg.nmax, eps, exc)
        hit = None
    if hit is not None:
        log.info("cache hit nmax=%d eps=%r", cfg.nmax, eps)
        return hit, basis
    H = core.assemble_hamiltonian(basis, core.ModelParams(eps))
    result = spectral.diagonalize(H, eps, cfg.nmax)
    cache.store(result, cfg.cache)
    return result, basis


def _suffix(cfg: RunConfig, eps: float) -> str:
    return "" if len(cfg.eps) == 1 else f"_eps{eps:g}"


def cmd_spectrum(cfg: RunConfig, args=None, out: Path | None = None) -> list[Path]:
    out = out or cfg.out
    files = []
    for eps in cfg.eps:
        res, _ = get_spectrum(cfg, eps)
        rows = ((i, e) for i, e in enumerate(res.eigenvalues))
        files.append(write_table(out / f"eigenvalues{_suffix(cfg, eps)}", ["index", "E_over_T0"], rows, cfg.format))
    return files


def _ipr_rows(res, basis):
    m = spectral.ipr_map(res, basis)
    return zip(m.n1, m.n2, m.inverse_purity)


def cmd_ipr_map(cfg: RunConfig, args=None, out: Path | None = None) -> list[Path]:
    out = out or cfg.out
    files = []
    for eps in cfg.eps:
        res, basis = get_spectrum(cfg, eps)
        files.append(write_table(out / f"ipr_map{_suffix(cfg, eps)}", ["n1", "n2", "inverse_purity"],
                                 _ipr_rows(res, basis), cfg.format))
    return files


def _overlap(cfg, eps, anchor, out, stem):
    res, basis = get_spectrum(cfg, eps)
    try:
        om = spectral.overlap_map(res, basis, anchor)
    except InvalidArgumentError:
        raise
    grid = write_table(out / stem, ["n1", "n2", "overlap"], zip(om.n1, om.n2, om.overlap), cfg.format)
    return om, grid


def cmd_overlap_map(cfg: RunConfig, args, out: Path | None = None) -> list[Path]:
    out = out or cfg.out
    if args.anchor is None:
        raise InvalidArgumentError("overlap-map needs --anchor N1,N2")
    anchor = _pair(args.anchor)
    files, summary = [], []
    for eps in cfg.eps:
        om, grid = _overlap(cfg, eps, anchor, out, f"overlap_map{_suffix(cfg, eps)}")
        files.append(grid)
        summary.append((eps, anchor[0], anchor[1], om.eigen_index, om.energy, om.max_value))
        print(f"eps={eps:g} anchor={anchor} eigenstate={om.eigen_index} max overlap={om.max_value:.4f}")
    files.append(write_table(out / "overlap_summary",
                             ["eps", "anchor_n1", "anchor_n2", "eigen_index", "E_over_T0", "max_overlap"],
                             summary, cfg.format))
    return files


def _level_stats(cfg, eps, out, suffix):
    res, _ = get_spectrum(cfg, eps)
    h = spectral.level_statistics(res, *cfg.band)
    rows = zip(h.centers, h.counts, spectral.poisson_pdf(h.centers), spectral.wigner_pdf(h.centers))
    hist = write_table(out / f"level_stats{suffix}", ["s", "count", "poisson_pdf", "wigner_pdf"], rows, cfg.format)
    return h, hist


def cmd_level_stats(cfg: RunConfig, args=None, out: Path | None = None) -> list[Path]:
    out = out or cfg.out
    files, summary = [], []
    for eps in cfg.eps:
        h, hist = _level_stats(cfg, eps, out, _suffix(cfg, eps))
        files.append(hist)
        summary.append((eps, *cfg.band, h.n_levels, h.spacings.mean(), h.ks_poisson, h.ks_wigner, h.verdict))
        print(f"eps={eps:g} band={cfg.band} levels={h.n_levels} KS(Poisson)={h.ks_poisson:.4f} "
              f"KS(Wigner-Dyson)={h.ks_wigner:.4f} -> {h.verdict}")
    files.append(write_table(out / "level_stats_summary",
                             ["eps", "nbar_min", "nbar_max", "n_levels", "mean_spacing", "ks_poisson", "ks_wigner",
                              "verdict"], summary, cfg.format))
    return files


OVERLAY_COLUMNS = ["p", "q", "k", "n1_start", "n2_start", "n1_end", "n2_end", "m_max"]


def cmd_resonances(cfg: RunConfig, args=None, out: Path | None = None) -> list[Path]:
    out = out or cfg.out
    basis = core.enumerate_basis(cfg.nmax)
    nbar_range = None if getattr(args, "all_lines", False) else cfg.band
    files = []
    for eps in cfg.eps:
        segs = atlas.resonance_overlay(basis, eps, cfg.mmax_min, nbar_range)
        kinds = sorted({(s.p, s.q) for s in segs}, key=lambda pq: (pq[0] ** 2 + pq[1] ** 2, pq[0]))
        print(f"eps={eps:g}: " + (", ".join(f"{p}:{q}" for p, q in kinds) or "no post-selected resonances"))
        files.append(write_table(out / f"resonances{_suffix(cfg, eps)}", OVERLAY_COLUMNS, segs, cfg.format))
    return files


THRESHOLD_COLUMNS = ["nbar", "mmax_min", "eps_first", "eps_no_gaps_rough", "eps_no_gaps_refined",
                     "dimensional_form", "quoted_refined", "note"]


def cmd_thresholds(cfg: RunConfig, args=None, out: Path | None = None) -> list[Path]:
    out = out or cfg.out
    nbars = _floats(getattr(args, "nbar", None) or "44.5")
    rows = []
    for nb in nbars:
        th = atlas.thresholds(nb, cfg.mmax_min)
        rows.append((nb, cfg.mmax_min, th.eps_first, th.eps_no_gaps_rough, th.eps_no_gaps_refined,
                     th.dimensional_form, th.quoted_refined, th.note))
        print(f"nbar={nb:g}: eps_first={th.eps_first:.4g} eps_no_gaps~{th.eps_no_gaps_rough:.4g} "
              f"refined={th.eps_no_gaps_refined:.4g}")
        print(f"  NOTE: {th.note}")
    return [write_table(out / "thresholds", THRESHOLD_COLUMNS, rows, cfg.format)]


def cmd_effective(cfg: RunConfig, args, out: Path | None = None) -> list[Path]:
    out = out or cfg.out
    res = atlas.Resonance.parse(args.resonance)
    if args.state is not None:
        line = atlas.resonance_line_through(_pair(args.state), res)
    elif args.k is not None:
        line = atlas.resonance_line(res, args.k)
    else:
        raise InvalidArgumentError("effective needs --state N1,N2 or --k K")
    ham = atlas.effective_hamiltonian(line)
    files, summary = [], []
    for eps in cfg.eps:
        sol = atlas.solve_effective(ham, eps, args.mcut)
        status = atlas.resonance_status(res, ham.nbar, eps, cfg.mmax_min)
        bound = sol.eigenvalues < eps * ham.V0
        files.append(write_table(out / f"effective{_suffix(cfg, eps)}", ["index", "E_over_T0", "bound"],
                                 zip(range(len(bound)), sol.eigenvalues, bound), cfg.format))
        summary.append((eps, res.p, res.q, line.k, ham.nbar, float(line.delta), ham.kinetic_prefactor, ham.V0,
                        ham.basis_kind, sol.m_max, status.selected, status.approximation_valid, sol.n_bound,
                        sol.truncated))
        print(f"eps={eps:g} {res} k={line.k} nbar={ham.nbar:.4f} m_max={sol.m_max:.4f} bound states={sol.n_bound}"
              + (" (truncated)" if sol.truncated else ""))
    files.append(write_table(out / "effective_summary",
                             ["eps", "p", "q", "k", "nbar", "delta", "kinetic_prefactor", "V0", "basis_kind", "m_max",
                              "post_selected", "approximation_valid", "n_bound", "truncated"], summary, cfg.format))
    return files


def cmd_classical_sim(cfg: RunConfig, args, out: Path | None = None) -> list[Path]:
    out = out or cfg.out
    rng = np.random.default_rng(cfg.seed)
    x = sorted(rng.uniform(0.0, 1.0, 2)) if args.x is None else sorted(_floats(args.x))
    v = tuple(rng.normal(size=2)) if args.v is None else _floats(args.v)
    eps = cfg.eps[0]
    state = classical.ClassicalState.from_mass_defect(x[0], x[1], v[0], v[1], eps)
    traj = classical.evolve(state, args.t_end if args.t_end else math.inf, args.events)
    u = classical.unfold(traj)
    rows = zip(traj.t, (classical.EVENT_NAMES[int(k)] for k in traj.kind), traj.x1, traj.x2, traj.v1, traj.v2,
               u.x[:, 0], u.x[:, 1], u.p[:, 0], u.p[:, 1])
    drift = float(np.max(np.abs(traj.energy / traj.energy[0] - 1.0)))
    print(f"eps={eps:g} events={len(traj) - 1} relative energy drift={drift:.3e}")
    return [write_table(out / "trajectory", ["t", "event", "x1", "x2", "v1", "v2", "X1", "X2", "P1", "P2"], rows,
                        cfg.format)]


def cmd_classical_avg(cfg: RunConfig, args, out: Path | None = None) -> list[Path]:
    out = out or cfg.out
    rows = []
    for i, r in enumerate(atlas.enumerate_resonances(args.norm2max)):
        h = classical.half_period(r.p, r.q)
        for frac in (0.0, 0.25, 0.5, 0.75, 1.0):
            off = frac * h
            exact = classical.prob_grey(r.p, r.q, off)
            est, se = classical.prob_grey_mc(r.p, r.q, off, args.samples, seed=(cfg.seed, i, int(frac * 4)))
            rows.append((r.p, r.q, off, frac, exact, est, se, classical.averaged_potential(r.p, r.q, off, 1.0)))
    return [write_table(out / "grey_probability",
                        ["p", "q", "offset", "offset_over_half_period", "prob_analytic", "prob_mc", "prob_mc_stderr",
                         "averaged_potential_over_Ebar"], rows, cfg.format)]


def cmd_coverage(cfg: RunConfig, args, out: Path | None = None) -> list[Path]:
    out = out or cfg.out
    nbar = float(args.nbar or 44.5)
    rows, summary = [], []
    for eps in cfg.eps:
        sc = classical.coverage_scan(eps, nbar, cfg.mmax_min, args.angles, classical=args.classical)
        rows.extend((eps, th, c) for th, c in zip(sc.angles, sc.counts))
        geo = classical.chirikov_geometry(eps, nbar, cfg.mmax_min) if eps > 0 else None
        summary.append((eps, nbar, geo.stripe_width if geo else 0.0,
                        math.inf if args.classical else (geo.r_quant if geo else 0.0), sc.covered, sc.doubly_covered))
        print(f"eps={eps:g} covered={sc.covered:.3f} doubly covered={sc.doubly_covered:.3f}")
    return [
        write_table(out / "coverage_angles", ["eps", "theta", "count"], rows, cfg.format),
        write_table(out / "coverage_summary", ["eps", "nbar", "stripe_width", "r_quant", "covered", "doubly_covered"],
                    summary, cfg.format),
    ]


# -- figure bundles ----------------------------------------------------------

COLUMN_DOCS = {
    "ipr_map": {"n1": "lower quantum number", "n2": "upper quantum number",
                "inverse_purity": "(sum over eigenstates of |<lam|n1,n2>|^4)^-1"},
    "resonances": {"p": "resonance p", "q": "resonance q", "k": "line label q*n1 + p*n2",
                   "n1_start": "segment start n1", "n2_start": "segment start n2", "n1_end": "segment end n1",
                   "n2_end": "segment end n2", "m_max": "resonance half-width in line steps"},
    "level_stats": {"s": "bin centre of unfolded spacing", "count": "spacings in bin",
                    "poisson_pdf": "exp(-s)", "wigner_pdf": "(pi s / 2) exp(-pi s^2 / 4)"},
    "level_stats_summary": {"eps": "mass defect", "nbar_min": "band lower edge", "nbar_max": "band upper edge",
                            "n_levels": "levels in band", "mean_spacing": "mean unfolded spacing",
                            "ks_poisson": "KS distance to Poisson", "ks_wigner": "KS distance to Wigner-Dyson",
                            "verdict": "closer distribution"},
    "overlap_map": {"n1": "lower quantum number", "n2": "upper quantum number",
                    "overlap": "|<lam*|n1,n2>|^2 for the eigenstate lam* best containing the anchor"},
    "stripe": {"eps": "mass defect", "stripe_width": "2^(3/2) sqrt(eps)", "r_quant": "quantum radius cap",
               "n_allowed": "post-selected resonances", "covered": "fraction of directions in >=1 resonance",
               "doubly_covered": "fraction in >=2 resonances", "eps_first": "first-resonance threshold",
               "eps_no_gaps_refined": "refined no-gaps threshold"},
    "stripe_points": {"eps": "mass defect", "p": "resonance p", "q": "resonance q",
                      "radius": "sqrt(p^2+q^2)", "theta": "resonance angle atan(q/p)",
                      "d_theta_res": "angular half-width", "allowed": "1 if radius <= r_quant"},
}


def _manifest(out: Path, figure: str, params: dict, files: list[Path]):
    entries = {}
    for f in files:
        stem = f.stem
        key = next((k for k in sorted(COLUMN_DOCS, key=len, reverse=True) if stem.startswith(k)), None)
        entries[f.name] = {"columns": COLUMN_DOCS.get(key, {})}
    doc = {"figure": figure, "parameters": params, "files": entries}
    path = out / "manifest.json"
    path.write_text(json.dumps(doc, indent=1, default=str) + "\n")
    return path


def cmd_reproduce(cfg: RunConfig, args, out: Path | None = None) -> list[Path]:
    fig = args.figure
    if fig not in FIGURES:
        raise InvalidArgumentError(f"unknown figure {fig!r}; choose from {sorted(FIGURES)}")
    figdef = FIGURES[fig]
    out = (out or cfg.out) / fig
    files: list[Path] = []
    params = {"nmax": cfg.nmax, "eps": figdef["eps"], "band": cfg.band, "mmax_min": cfg.mmax_min}
    if fig.startswith("fig2"):
        eps = figdef["eps"][0]
        sub = replace(cfg, eps=(eps,))
        res, basis = get_spectrum(sub, eps)
        files.append(write_table(out / "ipr_map", ["n1", "n2", "inverse_purity"], _ipr_rows(res, basis), cfg.format))
        # band-restricted overlay plus the full one for drawing lines across the whole map
        segs = atlas.resonance_overlay(basis, eps, cfg.mmax_min, cfg.band)
        files.append(write_table(out / "resonances", OVERLAY_COLUMNS, segs, cfg.format))
        segs = atlas.resonance_overlay(basis, eps, cfg.mmax_min)
        files.append(write_table(out / "resonances_all", OVERLAY_COLUMNS, segs, cfg.format))
        try:
            h, hist = _level_stats(sub, eps, out, "")
            files.append(hist)
            files.append(write_table(out / "level_stats_summary",
                                     ["eps", "nbar_min", "nbar_max", "n_levels", "mean_spacing", "ks_poisson",
                                      "ks_wigner", "verdict"],
                                     [(eps, *cfg.band, h.n_levels, h.spacings.mean(), h.ks_poisson, h.ks_wigner,
                                       h.verdict)], cfg.format))
        except BandError as exc:
            log.warning("level statistics skipped: %s", exc)
    elif fig == "fig3":
        anchors = figdef["anchors"]
        if getattr(args, "anchor", None):
            anchors = [_pair(a) for a in args.anchor.split(";")]
        params["anchors"] = anchors
        rows = []
        for panel, eps, anchor, quoted in zip(FIG3_PANELS, figdef["eps"], anchors, FIG3_QUOTED_MAX):
            om, grid = _overlap(replace(cfg, eps=(eps,)), eps, anchor, out, f"overlap_map_{panel}")
            files.append(grid)
            rows.append((panel, eps, anchor[0], anchor[1], om.eigen_index, om.energy, om.max_value, quoted))
            print(f"fig3{panel}: eps={eps:g} anchor={anchor} max overlap={om.max_value:.3f} (quoted {quoted})")
        files.append(write_table(out / "overlap_summary",
                                 ["panel", "eps", "anchor_n1", "anchor_n2", "eigen_index", "E_over_T0", "max_overlap",
                                  "quoted_max"], rows, cfg.format))
    else:
        nbar = 44.5
        th = atlas.thresholds(nbar, cfg.mmax_min)
        stripe, points = [], []
        for eps in figdef["eps"]:
            geo = classical.chirikov_geometry(eps, nbar, cfg.mmax_min)
            sc = classical.coverage_scan(eps, nbar, cfg.mmax_min, 1000)
            allowed = geo.allowed()
            stripe.append((eps, geo.stripe_width, geo.r_quant, len(allowed), sc.covered, sc.doubly_covered,
                           th.eps_first, th.eps_no_gaps_refined))
        for eps in (0.006, 0.02, 0.06):
            geo = classical.chirikov_geometry(eps, nbar, cfg.mmax_min)
            for r in atlas.enumerate_resonances(64):
                rad = math.sqrt(r.norm2)
                points.append((eps, r.p, r.q, rad, r.angle, geo.d_theta_res(r.p, r.q), rad <= geo.r_quant))
        params["nbar"] = nbar
        files.append(write_table(out / "stripe", ["eps", "stripe_width", "r_quant", "n_allowed", "covered",
                                                  "doubly_covered", "eps_first", "eps_no_gaps_refined"], stripe,
                                 cfg.format))
        files.append(write_table(out / "stripe_points", ["eps", "p", "q", "radius", "theta", "d_theta_res", "allowed"],
                                 points, cfg.format))
    files.append(_manifest(out, fig, params, files))
    return files


COMMANDS = {
    "spectrum": (cmd_spectrum, "eigenvalues of the perturbed Hamiltonian"),
    "ipr-map": (cmd_ipr_map, "inverse purity of every unperturbed state"),
    "overlap-map": (cmd_overlap_map, "weights of one perturbed eigenstate over the unperturbed basis"),
    "level-stats": (cmd_level_stats, "unfolded nearest-neighbour spacing statistics in an nbar band"),
    "resonances": (cmd_resonances, "post-selected resonance overlay segments"),
    "thresholds": (cmd_thresholds, "first-resonance and no-gaps thresholds"),
    "effective": (cmd_effective, "spectrum of the effective resonant Hamiltonian"),
    "classical-sim": (cmd_classical_sim, "event-driven classical trajectory and its unfolding"),
    "classical-avg": (cmd_classical_avg, "grey-square probability, analytic vs Monte Carlo"),
    "coverage": (cmd_coverage, "angular coverage of the energy shell by resonances"),
    "reproduce": (cmd_reproduce, "data bundle for one figure"),
}


def _common_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    S = argparse.SUPPRESS
    p.add_argument("--config", default=S, help="key = value configuration file; flags override it")
    p.add_argument("--nmax", type=int, default=S)
    p.add_argument("--eps", type=_floats, default=S, help="comma-separated list")
    p.add_argument("--band", type=_floats, default=S, help="NBAR_MIN,NBAR_MAX")
    p.add_argument("--mmaxmin", type=float, default=S)
    p.add_argument("--seed", type=int, default=S)
    p.add_argument("--out", type=Path, default=S)
    p.add_argument("--cache", type=Path, default=S, help=f"cache directory (${CACHE_ENV} overrides)")
    p.add_argument("--format", choices=["csv", "json"], default=S)
    p.add_argument("-v", "--verbose", action="store_true", default=S)
    return p


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise InvalidArgumentError(message)


def build_parser() -> argparse.ArgumentParser:
    common = _common_parser()
    parser = _Parser(prog="qchaos", description=__doc__.splitlines()[0], parents=[common])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    cmds = {}
    for name, (_, help_text) in COMMANDS.items():
        cmds[name] = sub.add_parser(name, help=help_text, parents=[common])
    cmds["overlap-map"].add_argument("--anchor", help="N1,N2")
    cmds["resonances"].add_argument("--all-lines", action="store_true", help="ignore --band, use the whole basis")
    cmds["thresholds"].add_argument("--nbar", help="comma-separated nbar values (default 44.5)")
    e = cmds["effective"]
    e.add_argument("--resonance", required=True, help="P:Q")
    e.add_argument("--state", help="N1,N2 on the line")
    e.add_argument("--k", type=int)
    e.add_argument("--mcut", type=int)
    c = cmds["classical-sim"]
    c.add_argument("--x", help="X1,X2 (random from --seed if omitted)")
    c.add_argument("--v", help="V1,V2 (random from --seed if omitted)")
    c.add_argument("--events", type=int, default=1000)
    c.add_argument("--t-end", type=float)
    cmds["classical-avg"].add_argument("--norm2max", type=int, default=41)
    cmds["classical-avg"].add_argument("--samples", type=int, default=10**5)
    cov = cmds["coverage"]
    cov.add_argument("--nbar", type=float)
    cov.add_argument("--angles", type=int, default=1000)
    cov.add_argument("--classical", action="store_true", help="no quantum radius cap")
    r = cmds["reproduce"]
    r.add_argument("figure", choices=sorted(FIGURES))
    r.add_argument("--anchor", help="fig3 anchors as N1,N2;N1,N2;N1,N2;N1,N2")
    return parser


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        logging.basicConfig(level=logging.INFO if getattr(args, "verbose", False) else logging.WARNING,
                            format="%(levelname)s %(name)s: %(message)s")
        cfg = build_config(args)
        func = COMMANDS[args.command][0]
        for f in func(cfg, args):
            print(f)
    except (InvalidArgumentError, BandError) as exc:
        print(f"qchaos: error: {exc}", file=sys.stderr)
        return EXIT_ARGS
    except OSError as exc:
        print(f"qchaos: I/O failure: {exc}", file=sys.stderr)
        return EXIT_IO
    except QChaosError as exc:
        print(f"qchaos: computation failed: {exc}", file=sys.stderr)
        return EXIT_COMPUTE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
