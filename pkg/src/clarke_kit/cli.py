"""Command-line front end: ``clarke-kit <command> [options]``.

Every ``cmd_*`` function returns ``(report, exit_code)`` so it can be driven
from Python as well as from the shell. Vectors are comma-separated decimals
(write ``--center=-1,0`` when the first entry is negative).
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import acceptance, density, epigraph, sampler
from .functions import catalog, lookup, reference_at
from .geometry import FiniteCone, caratheodory_reduce, distance_to_minkowski, support_value
from .report import dumps, points_csv, run_report
from .sampler import SamplingConfig


def parse_vector(text: str) -> np.ndarray:
    try:
        v = np.array([float(p) for p in str(text).split(",")], dtype=float)
    except ValueError:
        raise ValueError(f"bad vector: {text!r}") from None
    if not np.all(np.isfinite(v)):
        raise ValueError(f"bad vector: {text!r}")
    return v


def parse_normals(text: str | None, dim: int) -> FiniteCone | None:
    """``None`` keeps the catalog normals, ``"none"`` drops them, else ``"a,b;c,d"``."""
    if text is None:
        return None
    if text.strip().lower() == "none":
        return FiniteCone.empty(dim)
    return FiniteCone(np.array([parse_vector(p) for p in text.split(";")]), dim)


def _coordinate_supports(mset) -> dict:
    out = {}
    for j in range(mset.dim):
        e = np.zeros(mset.dim)
        e[j] = 1.0
        out[f"+e{j}"] = support_value(mset, e)
        out[f"-e{j}"] = support_value(mset, -e)
    return out


def _estimate(name, center, radius, samples, seed, normals=None):
    f, refs = lookup(name)
    c = parse_vector(center)
    cfg = SamplingConfig(radius=radius, max_samples=samples, seed=seed)
    return f, refs, c, sampler.estimate(f, cfg, c, parse_normals(normals, f.dim))


def cmd_estimate(function_name, center, radius=0.01, samples=1000, seed=0, normals_override=None, ref_tol=0.05):
    inputs = {"function": function_name, "center": center, "radius": radius, "samples": samples,
              "seed": seed, "normals": normals_override, "ref_tol": ref_tol}
    f, refs, c, est = _estimate(function_name, center, radius, samples, seed, normals_override)
    cloud = est.cloud
    outputs = {
        "hull_vertices": est.set.hull.vertices,
        "cone_generators": est.set.cone.generators,
        "kept_count": len(cloud.kept_gradients),
        "horizon_count": len(cloud.horizon_directions),
        "rejected_outside_domain": cloud.rejected_outside_domain,
        "rejected_nondifferentiable": cloud.rejected_nondifferentiable,
        "coordinate_supports": _coordinate_supports(est.set),
        "lifted_generators": est.lifted_generators,
    }
    verdict = None
    ref = reference_at(refs, c)
    if ref is not None and ref.set is not None:
        gap = sampler.hausdorff_vs_reference(est, ref)
        outputs["hausdorff_vs_reference"] = gap
        outputs["reference_source"] = ref.source
        verdict = bool(gap <= ref_tol)
    return run_report("estimate", inputs, outputs, verdict), 0 if verdict in (None, True) else 1


def cmd_stationarity(function_name, center, radius=0.01, samples=1000, seed=0, tol=0.05, normals_override=None):
    inputs = {"function": function_name, "center": center, "radius": radius, "samples": samples,
              "seed": seed, "tol": tol, "normals": normals_override}
    _, _, _, est = _estimate(function_name, center, radius, samples, seed, normals_override)
    rep = sampler.test_stationarity(est, tol)
    outputs = {"distance_to_zero": rep.distance_to_zero, "is_stationary": rep.is_stationary,
               "witness": rep.witness, "draws_used": rep.draws_used}
    return run_report("stationarity", inputs, outputs), 0


def cmd_distance(function_name, center, vector, radius=0.01, samples=1000, seed=0, normals_override=None):
    inputs = {"function": function_name, "center": center, "vector": vector, "radius": radius,
              "samples": samples, "seed": seed, "normals": normals_override}
    _, _, _, est = _estimate(function_name, center, radius, samples, seed, normals_override)
    dist, witness = distance_to_minkowski(parse_vector(vector), est.set)
    outputs = {"distance": dist, "witness": witness}
    if len(est.set.cone.generators) == 0:
        # without a conical part the witness is a convex combination of at most n + 1 gradients
        combo = caratheodory_reduce(witness, est.set.hull.points(), 1e-7)
        outputs["hull_combination"] = [{"weight": w, "point": p} for w, p in combo]
    return run_report("distance", inputs, outputs), 0


def cmd_access(scenario, t0=0.1, ratio=0.5, steps=8):
    inputs = {"scenario": scenario, "t0": t0, "ratio": ratio, "steps": steps}
    tr = epigraph.run_scenario(scenario, epigraph.default_schedule(t0, ratio, steps))
    outputs = {
        "base": {"x": tr.base[0], "value": tr.base[1]},
        "v": tr.direction_v,
        "w": tr.direction_w,
        "records": [{"t": r.t, "y": r.y, "projection": r.x, "proximal_normal": r.proximal_normal,
                     "residual": r.residual, "distance_to_base": r.distance_to_base} for r in tr.records],
        "loglog_slope": tr.loglog_slope(),
    }
    return run_report("access", inputs, outputs), 0


def cmd_density(scenario, center="0,0", radii="0.2,0.1,0.05,0.025", samples=100_000, seed=0):
    inputs = {"scenario": scenario, "center": center, "radii": radii, "samples": samples, "seed": seed}
    try:
        domain, epi_lip = density.SCENARIOS[scenario]
    except KeyError:
        raise ValueError(f"unknown density scenario: {scenario}") from None
    curve = density.density_curve(domain, parse_vector(center), parse_vector(radii), samples, seed)
    outputs = {"radii": curve.radii, "ratios": curve.ratios, "std_errors": curve.std_errors(),
               "loglog_slope": curve.loglog_slope(), "epi_lipschitz": epi_lip}
    return run_report("density", inputs, outputs), 0


def cmd_verify(only=None):
    results = acceptance.run(only)
    if not results:
        raise ValueError(f"no criterion matches: {only}")
    ok = all(r["passed"] for r in results)
    return run_report("verify", {"only": only}, {"criteria": results}, ok), 0 if ok else 1


def cmd_catalog():
    entries = []
    for name, f, refs in catalog():
        entries.append({
            "name": name,
            "dim": f.dim,
            "metadata": dict(f.metadata),
            "references": [{"base_point": r.base_point, "source": r.source,
                            "kind": "set" if r.set is not None else "membership"} for r in refs],
        })
    return run_report("catalog", {}, {"functions": entries}), 0


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="clarke-kit", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def sampling(sp, tol=False):
        sp.add_argument("--fn", required=True, help="catalog function name")
        sp.add_argument("--center", required=True, help="base point, e.g. 0,0")
        sp.add_argument("--radius", type=float, default=0.01)
        sp.add_argument("--samples", type=int, default=1000)
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--normals", default=None,
                        help="override normal-cone generators ('a,b;c,d') or 'none' to suppress")
        if tol:
            sp.add_argument("--tol", type=float, default=0.05)

    for name in ("estimate", "stationarity", "distance", "access", "density", "verify", "catalog"):
        sp = sub.add_parser(name)
        sp.add_argument("--out", default=None, help="write the JSON report here instead of stdout")
        if name in ("estimate", "stationarity", "distance"):
            sampling(sp, tol=name != "distance")
        if name == "estimate":
            sp.add_argument("--csv", default=None, help="write kept gradients as CSV")
        if name == "distance":
            sp.add_argument("--vector", required=True)
        if name == "access":
            sp.add_argument("--scenario", required=True, choices=sorted(epigraph.scenarios()))
            sp.add_argument("--t0", type=float, default=0.1)
            sp.add_argument("--ratio", type=float, default=0.5)
            sp.add_argument("--steps", type=int, default=8)
        if name == "density":
            sp.add_argument("--scenario", required=True, choices=sorted(density.SCENARIOS))
            sp.add_argument("--center", default="0,0")
            sp.add_argument("--radii", default="0.2,0.1,0.05,0.025")
            sp.add_argument("--samples", type=int, default=100_000)
            sp.add_argument("--seed", type=int, default=0)
        if name == "verify":
            sp.add_argument("--only", default=None, help="run only criteria whose name contains this")
    return p


def _dispatch(a):
    if a.command == "estimate":
        rep, code = cmd_estimate(a.fn, a.center, a.radius, a.samples, a.seed, a.normals, a.tol)
        if a.csv:
            _, _, _, est = _estimate(a.fn, a.center, a.radius, a.samples, a.seed, a.normals)
            with open(a.csv, "w", encoding="utf-8") as fh:
                fh.write(points_csv(est.cloud.kept_gradients))
        return rep, code
    if a.command == "stationarity":
        return cmd_stationarity(a.fn, a.center, a.radius, a.samples, a.seed, a.tol, a.normals)
    if a.command == "distance":
        return cmd_distance(a.fn, a.center, a.vector, a.radius, a.samples, a.seed, a.normals)
    if a.command == "access":
        return cmd_access(a.scenario, a.t0, a.ratio, a.steps)
    if a.command == "density":
        return cmd_density(a.scenario, a.center, a.radii, a.samples, a.seed)
    if a.command == "verify":
        return cmd_verify(a.only)
    return cmd_catalog()


def main(argv=None) -> int:
    a = _parser().parse_args(argv)
    try:
        rep, code = _dispatch(a)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    text = dumps(rep) + "\n"
    if a.out:
        with open(a.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
