"""Scenario files: a named pair of self-maps plus weights and expectations.

Plain key=value text, one pair per line, full-line # comments:

    name = translation-1d
    n = 1
    gamma = 1
    phi = z1
    psi = z1 + i
    expected.bounded = true
    expected.compact = false
    cfg.seed = 0

Required keys: name, n, gamma, phi, psi.  Optional: expected.bounded,
expected.compact (true/false) and cfg.* overrides for the analysis
configuration (seed, starts, refine_steps, unbounded_threshold,
compact_epsilon, schedule_ratio, schedule_steps).
"""

import re
from dataclasses import dataclass, field

from .criteria import CriterionConfig, default_schedules
from .selfmaps import ParseError, parse_selfmap

_NAME_RE = re.compile(r"^[A-Za-z0-9][A-Za-z0-9._-]*$")

_CFG_KEYS = {
    "cfg.seed": int,
    "cfg.starts": int,
    "cfg.refine_steps": int,
    "cfg.unbounded_threshold": float,
    "cfg.compact_epsilon": float,
    "cfg.schedule_ratio": float,
    "cfg.schedule_steps": int,
}


class ScenarioError(ValueError):
    def __init__(self, message, line=None):
        if line is not None:
            message = "line %d: %s" % (line, message)
        super().__init__(message)
        self.line = line


@dataclass
class Scenario:
    name: str
    n: int
    gamma: tuple
    phi_text: str
    psi_text: str
    expected_bounded: bool = None
    expected_compact: bool = None
    cfg_overrides: dict = field(default_factory=dict)

    def maps(self):
        return parse_selfmap(self.phi_text, self.n), parse_selfmap(self.psi_text, self.n)

    def config(self, extra=None):
        """CriterionConfig from defaults, scenario cfg.* keys, then extra."""
        values = dict(self.cfg_overrides)
        if extra:
            values.update({k: v for k, v in extra.items() if v is not None})
        ratio = values.pop("schedule_ratio", None)
        steps = values.pop("schedule_steps", None)
        cfg = CriterionConfig(**values)
        if ratio is not None or steps is not None:
            cfg.boundary_schedules = default_schedules(
                self.n, ratio if ratio is not None else 10.0, steps if steps is not None else 48
            )
        return cfg


def _parse_bool(raw, lineno):
    if raw == "true":
        return True
    if raw == "false":
        return False
    raise ScenarioError("expected true or false, got %r" % (raw,), lineno)


def parse_scenario_text(text):
    seen = {}
    lines = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ScenarioError("expected key = value", lineno)
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if not key:
            raise ScenarioError("missing key before '='", lineno)
        if key in seen:
            raise ScenarioError("duplicate key %r (first on line %d)" % (key, lines[key]), lineno)
        seen[key] = value
        lines[key] = lineno

    for req in ("name", "n", "gamma", "phi", "psi"):
        if req not in seen:
            raise ScenarioError("missing required key %r" % (req,))

    known = {"name", "n", "gamma", "phi", "psi", "expected.bounded", "expected.compact"}
    for key in seen:
        if key not in known and key not in _CFG_KEYS:
            raise ScenarioError("unknown key %r" % (key,), lines[key])

    name = seen["name"]
    if not _NAME_RE.match(name):
        raise ScenarioError("scenario name must be filesystem-safe, got %r" % (name,), lines["name"])

    try:
        n = int(seen["n"])
    except ValueError:
        raise ScenarioError("n must be an integer, got %r" % (seen["n"],), lines["n"]) from None
    if n < 1:
        raise ScenarioError("n must be >= 1, got %d" % (n,), lines["n"])

    parts = [p.strip() for p in seen["gamma"].split(",")]
    try:
        gamma = tuple(float(p) for p in parts)
    except ValueError:
        raise ScenarioError("gamma must be comma-separated numbers", lines["gamma"]) from None
    if len(gamma) != n:
        raise ScenarioError(
            "gamma has %d entries but n = %d" % (len(gamma), n), lines["gamma"]
        )
    if any(not g > 0.0 for g in gamma):
        raise ScenarioError("gamma entries must be positive", lines["gamma"])

    maps = {}
    for key in ("phi", "psi"):
        try:
            maps[key] = parse_selfmap(seen[key], n)
        except ParseError as exc:
            raise ScenarioError("%s: %s" % (key, exc), lines[key]) from None

    expected_bounded = None
    expected_compact = None
    if "expected.bounded" in seen:
        expected_bounded = _parse_bool(seen["expected.bounded"], lines["expected.bounded"])
    if "expected.compact" in seen:
        expected_compact = _parse_bool(seen["expected.compact"], lines["expected.compact"])

    overrides = {}
    for key, conv in _CFG_KEYS.items():
        if key in seen:
            try:
                overrides[key[len("cfg."):]] = conv(seen[key])
            except ValueError:
                raise ScenarioError(
                    "%s must be %s" % (key, conv.__name__), lines[key]
                ) from None

    return Scenario(
        name=name,
        n=n,
        gamma=gamma,
        phi_text=maps["phi"].text(),
        psi_text=maps["psi"].text(),
        expected_bounded=expected_bounded,
        expected_compact=expected_compact,
        cfg_overrides=overrides,
    )


def load_scenario(path):
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    return parse_scenario_text(text)


_BUILTIN_TEXTS = {
    "identity-pair": """
        name = identity-pair
        n = 1
        gamma = 1
        phi = z1
        psi = z1
        expected.bounded = true
        expected.compact = true
    """,
    "translation-1d": """
        name = translation-1d
        n = 1
        gamma = 1
        phi = z1
        psi = z1 + i
        expected.bounded = true
        expected.compact = false
    """,
    "translation-2d": """
        name = translation-2d
        n = 2
        gamma = 1, 1
        phi = z1; z2
        psi = z1 + i; z2 + i
        expected.bounded = true
        expected.compact = false
    """,
    "dilation-1d": """
        name = dilation-1d
        n = 1
        gamma = 1
        phi = z1
        psi = 2 * z1
        expected.bounded = true
        expected.compact = false
    """,
    "inversion-shift-1d": """
        name = inversion-shift-1d
        n = 1
        gamma = 1
        phi = -1 / z1
        psi = -1 / z1 + i
        expected.bounded = false
        expected.compact = false
    """,
}

BUILTIN_SCENARIOS = {name: parse_scenario_text(text) for name, text in _BUILTIN_TEXTS.items()}


def resolve_scenario(ref):
    """A builtin scenario name, or a path to a scenario file."""
    if ref in BUILTIN_SCENARIOS:
        return BUILTIN_SCENARIOS[ref]
    return load_scenario(ref)
