"""Scenario files: the families, separation goals and run parameters."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm

from .errors import ScenarioInvalid, Unsupported
from .numbers import fmt_rat, parse_rat
from .oracle import DEFAULT_HORIZON, DEFAULT_MIN_SIZE, STRATEGIES
from .vectors import FinSuppVec, InjPath, SeqSpec, check_paths_disjoint


@dataclass
class Family:
    name: str
    spec: SeqSpec
    xi: int
    from_stage: int = 0


@dataclass
class Scenario:
    name: str
    families: list
    d: FinSuppVec
    d0: FinSuppVec
    d1: FinSuppVec
    C: dict = field(default_factory=dict)      # from_stage -> indices
    anchor: int = 0
    seed: int = 0
    strategy: str = "largest"
    min_size: int = DEFAULT_MIN_SIZE
    horizon: int = DEFAULT_HORIZON
    stages: int = 3
    delta0: Fraction = None
    universe: int = None

    def families_at(self, t):
        return [f for f in self.families if f.from_stage <= t]

    def C_at(self, t):
        """Declared indices plus what the construction needs at level t."""
        out = set()
        for s, idx in self.C.items():
            if s <= t:
                out |= set(idx)
        for vec in (self.d, self.d0, self.d1):
            out |= set(vec.support())
        for f in self.families_at(t):
            out.add(f.xi)
            for path in f.spec.paths():
                if path.constant:
                    out.add(path.mu)
            for k in range(t + 1):
                out |= set(f.spec.eval(k).support())
        return out

    def validate(self):
        if self.stages < 1:
            raise ScenarioInvalid("at least one stage is required")
        if self.horizon < 1:
            raise ScenarioInvalid("the horizon must be positive")
        if self.strategy not in STRATEGIES:
            raise ScenarioInvalid(f"unknown oracle strategy {self.strategy!r}")
        names = [f.name for f in self.families]
        if len(set(names)) != len(names):
            raise ScenarioInvalid("family names must be distinct")
        for f in self.families:
            if f.name.startswith("chi[") or f.name.startswith("#"):
                raise ScenarioInvalid(f"family name {f.name!r} is reserved")
            if f.spec.is_zero():
                raise ScenarioInvalid(f"family {f.name} is the zero sequence")
            if f.from_stage < 0:
                raise ScenarioInvalid(f"family {f.name} starts at a negative stage")
            check_paths_disjoint(f.spec.paths())
            try:
                for path in f.spec.paths():
                    f.spec.law_on(path).lead()
            except Unsupported as exc:
                raise ScenarioInvalid(f"family {f.name}: {exc}") from None
        for a, b, label in ((self.d, self.d0, "d, d0"), (self.d, self.d1, "d, d1"),
                            (self.d0, self.d1, "d0, d1")):
            common = set(a.support()) & set(b.support())
            if common:
                raise ScenarioInvalid(f"supports of {label} overlap at {sorted(common)}")
        if not self.d.support():
            raise ScenarioInvalid("d must be nonzero")
        if not self.d0.support() and not self.d1.support():
            raise ScenarioInvalid("d0 and d1 must differ")
        if self.delta0 is not None and not 0 < self.delta0 < 1:
            raise ScenarioInvalid("delta0 must lie in (0, 1)")
        if self.universe is not None:
            idx = set(self.C_at(0)) | {self.anchor}
            top = max(idx)
            if top >= self.universe:
                raise ScenarioInvalid(f"index {top} outside the universe of size {self.universe}")
            for f in self.families:
                for path in f.spec.paths():
                    if isinstance(path, InjPath) and path.index(self.horizon) >= self.universe:
                        raise ScenarioInvalid(f"family {f.name} leaves the universe")
        return self

    # -- serialization

    def to_json(self):
        obj = {
            "name": self.name,
            "families": [{"name": f.name, "xi": f.xi, "from_stage": f.from_stage,
                          "spec": f.spec.to_json()} for f in self.families],
            "d": self.d.to_json(), "d0": self.d0.to_json(), "d1": self.d1.to_json(),
            "C": {str(s): sorted(idx) for s, idx in self.C.items()},
            "anchor": self.anchor, "seed": self.seed, "strategy": self.strategy,
            "min_size": self.min_size, "horizon": self.horizon, "stages": self.stages,
        }
        if self.delta0 is not None:
            obj["delta0"] = fmt_rat(self.delta0)
        if self.universe is not None:
            obj["universe"] = self.universe
        return obj

    @classmethod
    def from_json(cls, obj):
        try:
            fams = [Family(f["name"], SeqSpec.from_json(f["spec"], name=f["name"]),
                           int(f["xi"]), int(f.get("from_stage", 0)))
                    for f in obj.get("families", [])]
            C = obj.get("C", {})
            if isinstance(C, list):
                C = {0: C}
            scn = cls(
                name=obj.get("name", "scenario"), families=fams,
                d=FinSuppVec.from_json(obj["d"]),
                d0=FinSuppVec.from_json(obj.get("d0", {})),
                d1=FinSuppVec.from_json(obj.get("d1", {})),
                C={int(s): {int(i) for i in idx} for s, idx in C.items()},
                anchor=int(obj.get("anchor", 0)), seed=int(obj.get("seed", 0)),
                strategy=obj.get("strategy", "largest"),
                min_size=int(obj.get("min_size", DEFAULT_MIN_SIZE)),
                horizon=int(obj.get("horizon", DEFAULT_HORIZON)),
                stages=int(obj.get("stages", 3)),
                delta0=parse_rat(obj["delta0"]) if "delta0" in obj else None,
                universe=obj.get("universe"))
        except ScenarioInvalid:
            raise
        except (KeyError, TypeError, ValueError, Unsupported) as exc:
            raise ScenarioInvalid(f"malformed scenario: {exc}") from None
        return scn

    @classmethod
    def load(cls, path):
        try:
            with open(path) as fh:
                obj = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ScenarioInvalid(f"cannot read scenario {path}: {exc}") from None
        return cls.from_json(obj)


def integerize(vec: FinSuppVec, den=None):
    """(D, D*vec) with D the lcm of the denominators (or the given D)."""
    if den is None:
        den = vec.denominator()
    return den, vec.scale(den)


def common_denominator(*vecs):
    d = 1
    for v in vecs:
        d = lcm(d, v.denominator())
    return d
