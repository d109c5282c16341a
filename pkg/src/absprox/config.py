"""Flat `key = value` experiment configs.

Grammar::

    algorithm = psg                     # ppa | fb | psg
    Q = [[-2,2,2];[2,2,-2];[2,-2,2]]    # matrix rows separated by ';'
    set = ball(0,1)                     # ball(c,r) | box(lo,hi) | halfspace(n,b)
    x0 = [-5,5,-5]
    gamma0 = 1
    a0 = 200
    a_f = 4                             # optional oracle-coefficient pin
    schedule = psg_constant             # or name(args): ppa_additive(0.9), ...
    N = 101
    reference = auto_eigen              # or a vector; optional
    seed = 1                            # optional
    output = run.csv                    # optional

`#` starts a comment.  Parsing collects every error (with line numbers)
instead of stopping at the first; unknown keys are rejected.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

import numpy as np

__all__ = ["ExperimentConfig", "ConfigError", "parse_config"]

_ALGORITHMS = ("ppa", "fb", "psg")
_FUNCTIONS = ("abs_plus_square", "hessian_example")
_SCHEDULES = {
    "ppa_additive": 1,      # delta
    "psg_constant": 0,
    "psg_adaptive_v1": 2,   # a_const, a_f_const
    "psg_adaptive_v2": 1,   # epsilon
    "fb_constant": 1,       # a_const
}
_KNOWN_KEYS = (
    "algorithm", "function", "Q", "set", "x0", "gamma0", "a0", "a_f",
    "schedule", "N", "epsilon", "reference", "seed", "output",
)


class ConfigError(ValueError):
    """Carries the full list of config problems, one string per error."""

    def __init__(self, errors: list[str]):
        super().__init__("; ".join(errors))
        self.errors = list(errors)


@dataclass
class ExperimentConfig:
    algorithm: str
    x0: np.ndarray
    gamma0: float
    a0: float
    schedule: tuple  # (name, (args...))
    n_iter: int
    function: str | None = None
    q: np.ndarray | None = None
    set_desc: tuple | None = None  # (kind, (args...))
    a_f: float | None = None
    epsilon: float | None = None
    reference: np.ndarray | str | None = None  # vector or "auto_eigen"
    seed: int = 1
    output: str | None = None
    dim: int = field(init=False, default=0)

    def __post_init__(self):
        self.dim = int(np.atleast_1d(self.x0).size)


def _parse_number(text: str) -> float:
    return float(text)


def _parse_vector(text: str) -> np.ndarray:
    inner = text.strip()[1:-1].strip()
    if not inner:
        raise ValueError("empty vector")
    return np.array([float(t) for t in inner.split(",")], dtype=float)


def _parse_matrix(text: str) -> np.ndarray:
    body = text.strip()
    if not (body.startswith("[[") and body.endswith("]]")):
        raise ValueError("matrix must look like [[...];[...]]")
    rows = body[1:-1].split(";")
    parsed = [_parse_vector(r.strip()) for r in rows]
    lens = {len(r) for r in parsed}
    if len(lens) != 1:
        raise ValueError("matrix rows have unequal lengths")
    return np.array(parsed, dtype=float)


_CALL_RE = re.compile(r"^([a-z_0-9]+)\s*(?:\((.*)\))?$")


def _split_args(argtext: str) -> list[str]:
    """Split top-level comma-separated arguments, respecting brackets."""
    out, depth, cur = [], 0, []
    for ch in argtext:
        if ch == "[":
            depth += 1
        elif ch == "]":
            depth -= 1
        if ch == "," and depth == 0:
            out.append("".join(cur).strip())
            cur = []
        else:
            cur.append(ch)
    if cur:
        out.append("".join(cur).strip())
    return [a for a in out if a]


def _parse_set(text: str):
    m = _CALL_RE.match(text.strip())
    if not m:
        raise ValueError(f"malformed set descriptor {text!r}")
    kind, argtext = m.group(1), m.group(2) or ""
    args = _split_args(argtext)
    if kind not in ("ball", "box", "halfspace"):
        raise ValueError(f"unknown set kind {kind!r}")
    if len(args) != 2:
        raise ValueError(f"{kind} takes 2 arguments, got {len(args)}")

    def val(a):
        return _parse_vector(a) if a.startswith("[") else float(a)

    return kind, (val(args[0]), val(args[1]))


def _parse_schedule(text: str):
    m = _CALL_RE.match(text.strip())
    if not m:
        raise ValueError(f"malformed schedule {text!r}")
    name, argtext = m.group(1), m.group(2)
    if name not in _SCHEDULES:
        raise ValueError(
            f"unknown schedule {name!r} (known: {', '.join(sorted(_SCHEDULES))})"
        )
    args = tuple(float(a) for a in _split_args(argtext or ""))
    want = _SCHEDULES[name]
    if len(args) != want:
        raise ValueError(f"schedule {name} takes {want} parameter(s), got {len(args)}")
    return name, args


def parse_config(text: str) -> ExperimentConfig:
    """Parse and validate config text; raises ConfigError listing every problem."""
    errors: list[str] = []
    raw: dict[str, str] = {}
    lines: dict[str, int] = {}

    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            errors.append(f"line {lineno}: expected 'key = value', got {stripped!r}")
            continue
        key, value = (s.strip() for s in stripped.split("=", 1))
        if key not in _KNOWN_KEYS:
            errors.append(f"line {lineno}: unknown key {key!r}")
            continue
        if key in raw:
            errors.append(f"line {lineno}: duplicate key {key!r}")
            continue
        raw[key] = value
        lines[key] = lineno

    def fail(key, msg):
        errors.append(f"line {lines.get(key, 0)}: {msg}")

    # required keys
    for key in ("algorithm", "x0", "gamma0", "a0", "schedule", "N"):
        if key not in raw:
            errors.append(f"missing required key {key!r}")

    algorithm = raw.get("algorithm", "")
    if "algorithm" in raw and algorithm not in _ALGORITHMS:
        fail("algorithm", f"algorithm must be one of {_ALGORITHMS}, got {algorithm!r}")

    x0 = None
    if "x0" in raw:
        try:
            x0 = _parse_vector(raw["x0"]) if raw["x0"].startswith("[") \
                else np.array([float(raw["x0"])])
        except ValueError as e:
            fail("x0", f"bad x0: {e}")

    def number(key, default=None):
        if key not in raw:
            return default
        try:
            return _parse_number(raw[key])
        except ValueError:
            fail(key, f"malformed number {raw[key]!r}")
            return default

    gamma0 = number("gamma0")
    a0 = number("a0")
    a_f = number("a_f")
    epsilon = number("epsilon")
    if gamma0 is not None and gamma0 <= 0:
        fail("gamma0", "gamma must be positive")
    if epsilon is not None and epsilon <= 0:
        fail("epsilon", "epsilon must be positive")

    n_iter = None
    if "N" in raw:
        try:
            n_val = float(raw["N"])
            if n_val != int(n_val) or n_val < 0:
                raise ValueError
            n_iter = int(n_val)
        except ValueError:
            fail("N", f"N must be a nonnegative integer, got {raw['N']!r}")

    seed = 1
    if "seed" in raw:
        try:
            seed = int(raw["seed"])
        except ValueError:
            fail("seed", f"seed must be an integer, got {raw['seed']!r}")

    q = None
    if "Q" in raw:
        try:
            q = _parse_matrix(raw["Q"])
        except ValueError as e:
            fail("Q", f"bad matrix: {e}")

    function = raw.get("function")
    if function is not None and function not in _FUNCTIONS:
        fail("function", f"function must be one of {_FUNCTIONS}, got {function!r}")

    if "Q" in raw and "function" in raw:
        fail("function", "give either Q or function, not both")
    if "Q" not in raw and "function" not in raw:
        errors.append("missing oracle: give Q or function")

    set_desc = None
    if "set" in raw:
        try:
            set_desc = _parse_set(raw["set"])
        except ValueError as e:
            fail("set", str(e))

    schedule = None
    if "schedule" in raw:
        try:
            schedule = _parse_schedule(raw["schedule"])
        except ValueError as e:
            fail("schedule", str(e))

    reference = None
    if "reference" in raw:
        ref = raw["reference"].strip()
        if ref == "auto_eigen":
            reference = "auto_eigen"
        elif ref.startswith("["):
            try:
                reference = _parse_vector(ref)
            except ValueError as e:
                fail("reference", f"bad reference vector: {e}")
        else:
            fail("reference", f"reference must be auto_eigen or a vector, got {ref!r}")

    # cross-field consistency (only when the pieces parsed)
    if x0 is not None:
        dim = x0.size
        if q is not None and q.shape != (dim, dim):
            fail("Q", f"Q is {q.shape[0]}x{q.shape[1]} but x0 has dimension {dim}")
        if function == "abs_plus_square" and dim != 1:
            fail("x0", "abs_plus_square is one-dimensional")
        if function == "hessian_example" and dim != 2:
            fail("x0", "hessian_example is two-dimensional")
        if set_desc is not None:
            kind, args = set_desc
            sizes = [np.atleast_1d(a).size for a in args if isinstance(a, np.ndarray)]
            if any(s not in (1, dim) for s in sizes):
                fail("set", "set descriptor dimension does not match x0")
        if isinstance(reference, np.ndarray) and reference.size != dim:
            fail("reference", "reference vector dimension does not match x0")

    if algorithm == "psg" and "set" not in raw:
        errors.append("psg requires a set")
    if algorithm == "fb" and function != "hessian_example" and "function" in raw:
        fail("function", "fb supports the hessian_example function")
    if algorithm == "fb" and epsilon is None:
        errors.append("fb requires epsilon (curvature margin)")

    if schedule is not None and algorithm in _ALGORITHMS:
        name = schedule[0]
        compatible = {
            "ppa": ("ppa_additive",),
            "psg": ("psg_constant", "psg_adaptive_v1", "psg_adaptive_v2"),
            "fb": ("fb_constant", "psg_constant", "psg_adaptive_v2"),
        }[algorithm]
        if name not in compatible:
            fail("schedule", f"schedule {name} is not usable with algorithm {algorithm}")

    if errors:
        raise ConfigError(errors)

    return ExperimentConfig(
        algorithm=algorithm, x0=x0, gamma0=gamma0, a0=a0, schedule=schedule,
        n_iter=n_iter, function=function, q=q, set_desc=set_desc, a_f=a_f,
        epsilon=epsilon, reference=reference, seed=seed,
        output=raw.get("output"),
    )
