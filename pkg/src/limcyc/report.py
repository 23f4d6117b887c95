"""The analysis report: everything one run learned about one model, as JSON."""

import json
from dataclasses import dataclass, field

from . import __version__ as TOOL_VERSION
from .certify import StarShapeCertificate, TrappingRegion, Verdict
from .cycle import CycleResult
from .verify import SweepReport

SCHEMA_VERSION = 1


@dataclass
class AnalysisReport:
    """Certificates, verdict and (optionally) the measured cycle and sweep.

    ``checks`` holds the empirical trapping and origin campaigns run by the
    full pipeline; ``timings`` maps a stage name to wall-clock seconds.
    """

    phi_source: str
    parameters: dict
    certificate: StarShapeCertificate
    trapping: TrappingRegion
    circle_divisors: list | None
    origin_value: float
    verdict: Verdict
    cycle: CycleResult | None = None
    sweep: SweepReport | None = None
    checks: dict = field(default_factory=dict)
    tool_version: str = TOOL_VERSION
    timings: dict = field(default_factory=dict)
    schema_version: int = SCHEMA_VERSION

    def to_json(self):
        return {
            "schema_version": self.schema_version,
            "tool_version": self.tool_version,
            "phi_source": self.phi_source,
            "parameters": dict(self.parameters),
            "certificate": self.certificate.to_json(),
            "trapping": self.trapping.to_json(),
            "circle_divisors": None if self.circle_divisors is None else list(self.circle_divisors),
            "origin_value": self.origin_value,
            "verdict": self.verdict.to_json(),
            "cycle": self.cycle.to_json() if self.cycle is not None else None,
            "sweep": self.sweep.to_json() if self.sweep is not None else None,
            "checks": self.checks,
            "timings": dict(self.timings),
        }

    @classmethod
    def from_json(cls, d):
        if d.get("schema_version") != SCHEMA_VERSION:
            raise ValueError(f"unsupported schema_version {d.get('schema_version')!r}")
        return cls(
            phi_source=d["phi_source"],
            parameters=d["parameters"],
            certificate=StarShapeCertificate.from_json(d["certificate"]),
            trapping=TrappingRegion.from_json(d["trapping"]),
            circle_divisors=d["circle_divisors"],
            origin_value=d["origin_value"],
            verdict=Verdict.from_json(d["verdict"]),
            cycle=CycleResult.from_json(d["cycle"]) if d["cycle"] is not None else None,
            sweep=SweepReport.from_json(d["sweep"]) if d["sweep"] is not None else None,
            checks=d["checks"],
            tool_version=d["tool_version"],
            timings=d["timings"],
            schema_version=d["schema_version"],
        )

    def dumps(self, include_timings=True):
        d = self.to_json()
        if not include_timings:
            d["timings"] = {}
        return json.dumps(d, indent=2, sort_keys=True) + "\n"

    @classmethod
    def loads(cls, text):
        return cls.from_json(json.loads(text))
