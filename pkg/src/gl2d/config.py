"""Run configuration: validation, derived objects, and the file format.

Config files are flat ``key = value`` text; lists are comma separated and
``#`` starts a comment.  Every knob has a CLI flag override.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field, replace

from .errors import ConfigRejected
from .gf import field
from .induction import InductionSpace
from .od import KAPPA_MODES, RingParams
from .weight import WeightParams

SUITE_NAMES = (
    "arith",
    "weight",
    "coset",
    "hecke",
    "prop33",
    "prop34",
    "lemma35",
    "theorem",
    "probe",
)


@dataclass(frozen=True)
class Config:
    p: int = 7
    f: int = 2
    e: int = 1
    w: int = 1
    r_vec: tuple = (3, 3)
    n_max: int = 2
    kappa_mode: str = "absolute"
    backend: str = "auto"  # auto -> exact when e = 1 else tracked
    suites: tuple = SUITE_NAMES
    seed: int = 0
    digits: int = 0  # 0 -> derived from n_max and kappa
    probe_depth: int = 0
    workers: int = 1
    disputed: str = "fail"  # 'fail' | 'divergence': class of printed-form mismatches

    def validated(self) -> "Config":
        if self.p < 2:
            raise ConfigRejected("p must be a prime >= 2")
        if self.f < 1 or self.w < 1 or self.e < 1:
            raise ConfigRejected("f, w, e must be positive")
        deg = self.w * self.f
        if len(self.r_vec) != deg:
            raise ConfigRejected(
                f"r_vec has length {len(self.r_vec)}, needs w*f = {deg}"
            )
        if any(r < 0 or r > self.p - 1 for r in self.r_vec):
            raise ConfigRejected("each r_j must lie in [0, p-1]")
        if self.kappa_mode not in KAPPA_MODES:
            raise ConfigRejected(f"kappa_mode must be one of {KAPPA_MODES}")
        if self.backend not in ("auto", "exact", "tracked"):
            raise ConfigRejected("backend must be auto, exact or tracked")
        if self.backend == "exact" and self.e != 1:
            raise ConfigRejected("exact backend requires e = 1")
        unknown = [s for s in self.suites if s not in SUITE_NAMES]
        if unknown:
            raise ConfigRejected(f"unknown suites: {unknown}")
        if self.n_max < 1:
            raise ConfigRejected("n_max must be >= 1")
        if self.probe_depth not in (0, 1):
            raise ConfigRejected("probe depth is capped at 1")
        if "theorem" in self.suites or "probe" in self.suites:
            self.require_theorem_hypotheses()
        return self

    def require_theorem_hypotheses(self):
        deg = self.w * self.f
        if deg <= 1:
            raise ConfigRejected(
                "the basis enumeration covers only w*f > 1"
            )
        if any(not (2 < r < self.p - 3) for r in self.r_vec):
            raise ConfigRejected(
                "basis enumeration requires 2 < r_j < p-3 for every j"
            )

    # -- derived objects ------------------------------------------------------

    @property
    def kappa(self) -> int:
        return self.e * self.w if self.kappa_mode == "absolute" else self.e

    @property
    def resolved_backend(self) -> str:
        if self.backend != "auto":
            return self.backend
        return "exact" if self.e == 1 else "tracked"

    @property
    def ndigits(self) -> int:
        if self.digits:
            return self.digits
        return self.n_max + self.kappa + 2

    def build_space(self) -> InductionSpace:
        F = field(self.p, self.f, self.w)
        ring = RingParams.make(
            F,
            e=self.e,
            ndigits=self.ndigits,
            kappa_mode=self.kappa_mode,
            backend=self.resolved_backend,
        )
        return InductionSpace(ring, WeightParams(F, self.r_vec))

    def summary(self) -> dict:
        return {
            "p": self.p,
            "f": self.f,
            "e": self.e,
            "w": self.w,
            "r_vec": list(self.r_vec),
            "n_max": self.n_max,
            "kappa_mode": self.kappa_mode,
            "backend": self.resolved_backend,
            "digits": self.ndigits,
            "seed": self.seed,
            "suites": list(self.suites),
            "probe_depth": self.probe_depth,
            "disputed": self.disputed,
        }


def _parse_value(key: str, raw: str):
    raw = raw.strip()
    if key in ("r", "r_vec"):
        return tuple(int(v) for v in raw.replace("(", "").replace(")", "").split(","))
    if key == "suites":
        return tuple(s.strip() for s in raw.split(",") if s.strip())
    if key in ("kappa_mode", "backend", "disputed"):
        return raw
    return int(raw)


_KEYMAP = {
    "r": "r_vec",
    "nmax": "n_max",
    "n-max": "n_max",
}


def parse_config_text(text: str, base: Config | None = None) -> Config:
    cfg = base or Config()
    updates = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigRejected(f"line {lineno}: expected 'key = value'")
        key, raw = (part.strip() for part in line.split("=", 1))
        key = _KEYMAP.get(key, key)
        if key not in Config.__dataclass_fields__:
            raise ConfigRejected(f"line {lineno}: unknown key {key!r}")
        updates[key] = _parse_value(key, raw)
    return replace(cfg, **updates).validated()


def load_config(path, base: Config | None = None) -> Config:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config_text(fh.read(), base)
