"""Run configuration: scalar string grammar, weight selectors, validation.

Scalars in config files and CLI flags are exact strings: signed sums of
rational terms, optionally times a power of eps ("1", "2/3", "eps^2",
"1 - 2*eps^-1").  The float backend additionally accepts complex literals
with "i" or "j" as the imaginary unit ("0.7+0.2i") and decimal coefficients.
Parsing is total and deterministic; anything outside the grammar raises
ConfigError naming the offending field.
"""

from __future__ import annotations

import json
import math
import random
import re
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product

from .errors import ConfigError

try:
    import tomllib as _toml
except ModuleNotFoundError:  # 3.10
    import tomli as _toml

_RAT = r"\d+(?:/\d+|\.\d+)?"
_TERM = re.compile(
    rf"(?P<sign>[+-]?)"
    rf"(?:(?P<coef>{_RAT})(?:\*eps(?:\^(?P<cexp>-?\d+))?)?"
    rf"|eps(?:\^(?P<exp>-?\d+))?)"
)


def _coef_value(backend, text: str):
    if "." in text:
        if backend.is_exact:
            raise ConfigError(f"decimal coefficient {text!r} needs the float backend")
        return complex(float(text))
    return backend.from_rational(Fraction(text))


def parse_scalar(backend, text, fieldname: str = "scalar"):
    """Parse an exact scalar string for the given backend."""
    s = "".join(str(text).split())
    if not s:
        raise ConfigError(f"{fieldname}: empty scalar string")
    if not backend.is_exact and "eps" not in s and ("i" in s or "j" in s):
        try:
            return complex(s.replace("i", "j"))
        except ValueError:
            raise ConfigError(f"{fieldname}: cannot parse complex literal {text!r}")
    acc = backend.zero
    pos = 0
    first = True
    while pos < len(s):
        m = _TERM.match(s, pos)
        if m is None or (not first and not m.group("sign")):
            raise ConfigError(f"{fieldname}: cannot parse scalar {text!r} at position {pos}")
        coef = m.group("coef")
        if coef is not None:
            term = _coef_value(backend, coef)
            has_eps = "eps" in m.group(0)
            exp = m.group("cexp")
        else:
            term = backend.one
            has_eps = True
            exp = m.group("exp")
        if has_eps:
            term = term * (backend.eps_pow(int(exp)) if exp is not None else backend.eps)
        if m.group("sign") == "-":
            term = -term
        acc = acc + term
        pos = m.end()
        first = False
    return acc


def scalar_to_string(backend, x) -> str:
    if backend.is_exact:
        return x.to_string()
    z = complex(x)
    return f"{z.real!r}+{z.imag!r}i"


def parse_weight_selector(text, n: int, l: int, seed: int, fieldname: str = "lambda"):
    """Resolve a weight selector to a list of weight tuples.

    "all" enumerates Z_l^n; "random:k" draws k distinct seeded samples;
    a comma list like "1,2" is a single weight.
    """
    if isinstance(text, (list, tuple)):
        weights = [tuple(int(x) for x in text)]
    else:
        s = str(text).strip()
        if s == "all":
            return [tuple(w) for w in product(range(l), repeat=n)]
        if s.startswith("random:"):
            try:
                k = int(s.split(":", 1)[1])
            except ValueError:
                raise ConfigError(f"{fieldname}: bad sample count in {text!r}")
            if k <= 0:
                raise ConfigError(f"{fieldname}: sample count must be positive")
            rng = random.Random(seed)
            space = l**n
            k = min(k, space)
            picks = rng.sample(range(space), k)
            weights = []
            for p in sorted(picks):
                w = []
                for _ in range(n):
                    w.append(p % l)
                    p //= l
                weights.append(tuple(reversed(w)))
            return weights
        try:
            weights = [tuple(int(x) for x in s.split(","))]
        except ValueError:
            raise ConfigError(f"{fieldname}: cannot parse weight {text!r}")
    for w in weights:
        if len(w) != n:
            raise ConfigError(f"{fieldname}: weight {w} has length {len(w)}, expected {n}")
        if any(x < 0 or x >= l for x in w):
            raise ConfigError(f"{fieldname}: entries of {w} must lie in 0..{l - 1}")
    return weights


_DEFAULTS = {
    "n": 2,
    "l": 3,
    "backend": "exact",
    "tolerance": 1e-10,
    "lam": "all",
    "a": "1",
    "a_plus": "1",
    "a_minus": "1",
    "sign": "both",
    "level": "finite,affine",
    "seed": 0,
    "out": None,
    "format": "json",
    "timing": False,
    "strict_gcd": False,
    "corrupt_action": False,
    "sweep": False,
    "generator": "k1",
    "route": "closed",
    "index": "support",
}


@dataclass
class RunConfig:
    """Validated run parameters shared by all subcommands."""

    n: int = 2
    l: int = 3
    backend: str = "exact"
    tolerance: float = 1e-10
    lam: object = "all"
    a: str = "1"
    a_plus: str = "1"
    a_minus: str = "1"
    sign: str = "both"
    level: str = "finite,affine"
    seed: int = 0
    out: str | None = None
    format: str = "json"
    timing: bool = False
    strict_gcd: bool = False
    corrupt_action: bool = False
    sweep: bool = False
    generator: str = "k1"
    route: str = "closed"
    index: str = "support"

    def validate(self, needs_affine: bool = False) -> None:
        if self.l < 3 or self.l % 2 == 0:
            raise ConfigError(f"l: root order must be odd and >= 3, got {self.l}")
        if self.n < 1:
            raise ConfigError(f"n: rank must be >= 1, got {self.n}")
        if needs_affine and self.n < 2:
            raise ConfigError("n: affine suites need rank >= 2")
        if self.backend not in ("exact", "float"):
            raise ConfigError(f"backend: must be 'exact' or 'float', got {self.backend!r}")
        if self.sign not in ("+", "-", "both"):
            raise ConfigError(f"sign: must be '+', '-' or 'both', got {self.sign!r}")
        if self.format not in ("json", "text"):
            raise ConfigError(f"format: must be 'json' or 'text', got {self.format!r}")
        if self.strict_gcd and math.gcd(self.l, self.n + 1) != 1:
            raise ConfigError(
                f"l: gcd(l, n+1) = {math.gcd(self.l, self.n + 1)} != 1 "
                "(strict mode rejects this pair)"
            )

    @property
    def signs(self) -> list[str]:
        return ["+", "-"] if self.sign == "both" else [self.sign]

    @property
    def levels(self) -> list[str]:
        parts = [p.strip() for p in self.level.split(",") if p.strip()]
        for p in parts:
            if p not in ("finite", "affine"):
                raise ConfigError(f"level: unknown suite level {p!r}")
        return parts

    def gcd_warning(self) -> str | None:
        g = math.gcd(self.l, self.n + 1)
        if g == 1:
            return None
        return (
            f"gcd(l, n+1) = {g}: fractional eps exponents are avoided internally; "
            "standalone fundamental-weight torus actions may be undefined"
        )


def load_config_file(path: str) -> dict:
    """Read a JSON or TOML config file into a flat dict."""
    try:
        with open(path, "rb") as fh:
            raw = fh.read()
    except OSError as exc:
        raise ConfigError(f"config: cannot read {path}: {exc}")
    text = raw.decode("utf-8")
    if path.endswith(".toml"):
        try:
            return _toml.loads(text)
        except _toml.TOMLDecodeError as exc:
            raise ConfigError(f"config: TOML parse error in {path}: {exc}")
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        try:
            return _toml.loads(text)
        except _toml.TOMLDecodeError:
            raise ConfigError(f"config: {path} is neither valid JSON nor TOML")


def build_config(file_values: dict | None, cli_values: dict) -> RunConfig:
    """Merge defaults, config file, and explicit CLI flags (CLI wins)."""
    merged = dict(_DEFAULTS)
    if file_values:
        for key, value in file_values.items():
            norm = key.replace("-", "_")
            if norm == "lambda":
                norm = "lam"
            if norm not in merged:
                raise ConfigError(f"config: unknown field {key!r}")
            merged[norm] = value
    for key, value in cli_values.items():
        if value is not None:
            merged[key] = value
    try:
        merged["n"] = int(merged["n"])
        merged["l"] = int(merged["l"])
        merged["seed"] = int(merged["seed"])
        merged["tolerance"] = float(merged["tolerance"])
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"config: bad numeric field: {exc}")
    return RunConfig(**merged)
