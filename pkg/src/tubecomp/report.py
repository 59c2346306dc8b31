"""Scenario reports: run the analyses, serialize deterministically.

The JSON and CSV renderings are byte-stable for a fixed package version,
scenario, and configuration, except for the wall_ms field.  Floats are
emitted with 17 significant digits (lossless round-trip); non-finite
numbers use the Infinity/NaN tokens.
"""

import json
import math
import os
import tempfile
import time

from .criteria import (
    INCONCLUSIVE,
    BOUNDED,
    COMPACT,
    compactness_limits,
    estimate_sup_boundedness,
    lower_bound_at,
    operator_norm_probe,
    psumming_family,
    psumming_ratio,
)
from .halfplane import TubePoint
from .selfmaps import validate


def _pt(z):
    return [[float(c.real), float(c.imag)] for c in z]


def _validation_block(report):
    block = {
        "verdict": report.verdict,
        "counterexample": None if report.counterexample is None else _pt(report.counterexample),
        "samples_checked": report.samples_checked,
    }
    return block


def run_scenario(scenario, cfg=None, probe_family_size=8, psumming_sizes=(1, 2, 4, 8)):
    """Full analysis of one scenario; returns the report as a plain dict.

    Raises ValueError when either map fails self-map validation.
    """
    t0 = time.perf_counter()
    phi, psi = scenario.maps()
    cfg = cfg or scenario.config()
    gamma = scenario.gamma
    n = scenario.n

    val_phi = validate(phi)
    val_psi = validate(psi)
    for label, rep in (("phi", val_phi), ("psi", val_psi)):
        if rep.verdict == "rejected":
            raise ValueError(
                "%s = %s is not a self-map of H^%d (fails at z = %s)"
                % (label, (phi if label == "phi" else psi).text(), n, rep.counterexample)
            )

    bnd = estimate_sup_boundedness(phi, psi, gamma, cfg)
    cmp_ = compactness_limits(phi, psi, gamma, cfg)

    anchor = TubePoint((1j,) * n)
    probe_points = [anchor]
    for sched in cfg.schedules_for(n):
        pts = sched.points(n)
        for j in (3, 7):
            if j < len(pts):
                probe_points.append(pts[j])
    lower_rows = [
        {"z": _pt(z), "value": float(lower_bound_at(phi, psi, gamma, z))} for z in probe_points
    ]

    probe_value = operator_norm_probe(
        phi, psi, gamma, probe_family_size, seed=cfg.seed, anchors=(anchor,)
    )

    psum_rows = []
    for size in psumming_sizes:
        fns, centers = psumming_family(n, gamma, size, cfg.seed)
        ratio = psumming_ratio(phi, psi, gamma, fns, seed=cfg.seed, witnesses=centers)
        psum_rows.append({"size": size, "ratio": float(ratio)})

    agree_bounded = None
    if scenario.expected_bounded is not None and bnd.verdict != INCONCLUSIVE:
        agree_bounded = (bnd.verdict == BOUNDED) == scenario.expected_bounded
    agree_compact = None
    if scenario.expected_compact is not None and cmp_.verdict != INCONCLUSIVE:
        agree_compact = (cmp_.verdict == COMPACT) == scenario.expected_compact

    exit_code = 0 if (bnd.verdict != INCONCLUSIVE and cmp_.verdict != INCONCLUSIVE) else 2
    wall_ms = int(round((time.perf_counter() - t0) * 1000.0))

    from . import __version__

    return {
        "scenario": {
            "name": scenario.name,
            "n": n,
            "gamma": [float(g) for g in gamma],
            "phi": phi.text(),
            "psi": psi.text(),
        },
        "version": __version__,
        "seed": cfg.seed,
        "config": {
            "seed": cfg.seed,
            "starts": cfg.starts,
            "refine_steps": cfg.refine_steps,
            "unbounded_threshold": cfg.unbounded_threshold,
            "compact_epsilon": cfg.compact_epsilon,
            "schedules": [s.label() for s in cfg.schedules_for(n)],
        },
        "validation": {"phi": _validation_block(val_phi), "psi": _validation_block(val_psi)},
        "boundedness": {
            "verdict": bnd.verdict,
            "sup_estimate": float(bnd.sup_estimate),
            "witness": _pt(bnd.witness),
            "traces": bnd.probe_traces,
        },
        "compactness": {
            "verdict": cmp_.verdict,
            "limsup_phi": float(cmp_.limsup_phi),
            "limsup_psi": float(cmp_.limsup_psi),
            "traces": cmp_.probe_traces,
        },
        "lower_bounds": lower_rows,
        "operator_norm_probe": {"family_size": probe_family_size, "value": float(probe_value)},
        "psumming": psum_rows,
        "expected": {
            "bounded": scenario.expected_bounded,
            "compact": scenario.expected_compact,
        },
        "agreement": {"bounded": agree_bounded, "compact": agree_compact},
        "exit_code": exit_code,
        "wall_ms": wall_ms,
    }


def _fmt_float(x):
    if math.isnan(x):
        return "NaN"
    if math.isinf(x):
        return "Infinity" if x > 0 else "-Infinity"
    return "%.17g" % x


def _write_json(obj, out, indent):
    pad = "  " * indent
    if isinstance(obj, dict):
        if not obj:
            out.append("{}")
            return
        out.append("{\n")
        for i, (key, val) in enumerate(obj.items()):
            out.append("%s  %s: " % (pad, json.dumps(key)))
            _write_json(val, out, indent + 1)
            out.append(",\n" if i < len(obj) - 1 else "\n")
        out.append(pad + "}")
    elif isinstance(obj, (list, tuple)):
        if not obj:
            out.append("[]")
            return
        out.append("[\n")
        for i, val in enumerate(obj):
            out.append(pad + "  ")
            _write_json(val, out, indent + 1)
            out.append(",\n" if i < len(obj) - 1 else "\n")
        out.append(pad + "]")
    elif obj is None or obj is True or obj is False:
        out.append(json.dumps(obj))
    elif isinstance(obj, float):
        out.append(_fmt_float(obj))
    elif isinstance(obj, int):
        out.append(str(obj))
    elif isinstance(obj, str):
        out.append(json.dumps(obj))
    else:
        raise TypeError("cannot serialize %r" % (type(obj),))


def render_json(report):
    out = []
    _write_json(report, out, 0)
    return "".join(out) + "\n"


def _flatten(obj, prefix, rows):
    if isinstance(obj, dict):
        for key, val in obj.items():
            _flatten(val, "%s.%s" % (prefix, key) if prefix else key, rows)
    elif isinstance(obj, (list, tuple)):
        for idx, val in enumerate(obj):
            _flatten(val, "%s.%d" % (prefix, idx), rows)
    else:
        rows.append((prefix, obj))


def _csv_cell(value):
    if value is None:
        return "null"
    if value is True:
        return "true"
    if value is False:
        return "false"
    if isinstance(value, float):
        return _fmt_float(value)
    if isinstance(value, int):
        return str(value)
    text = str(value)
    if any(ch in text for ch in ",\"\n"):
        text = '"%s"' % text.replace('"', '""')
    return text


def render_csv(report):
    rows = []
    _flatten(report, "", rows)
    lines = ["key,value"]
    for key, value in rows:
        lines.append("%s,%s" % (key, _csv_cell(value)))
    return "\n".join(lines) + "\n"


def write_report(report, path, fmt="json"):
    """Atomic write: render fully, then replace the target in one step."""
    if fmt == "json":
        text = render_json(report)
    elif fmt == "csv":
        text = render_csv(report)
    else:
        raise ValueError("unknown report format %r" % (fmt,))
    parent = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(prefix=".report-", dir=parent)
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        umask = os.umask(0)
        os.umask(umask)
        os.chmod(tmp, 0o666 & ~umask)  # mkstemp creates 0600
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise
    return text
