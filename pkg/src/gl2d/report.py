"""Check records and report emission.

The structured (JSON) report is byte-identical across reruns with the
same configuration and seed: wall-clock timings appear only in the plain
text summary.  Record statuses:

- ``pass`` / ``fail``: hard checks; any ``fail`` makes the run exit 1.
- ``divergence``: an independently computed value disagrees with a
  conventional closed-form expression that the engine's own exact
  arithmetic refutes; both sides are serialized.  Counted as a failure by
  default (``disputed = fail``), reportable-only under
  ``disputed = divergence``.
- ``skip``: a check whose preconditions do not hold (soft).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field as dc_field


@dataclass
class CheckRecord:
    suite: str
    name: str
    law: str
    status: str  # pass | fail | divergence | skip
    params: dict = dc_field(default_factory=dict)
    details: str = ""

    def as_dict(self):
        return {
            "suite": self.suite,
            "name": self.name,
            "law": self.law,
            "status": self.status,
            "params": self.params,
            "details": self.details,
        }


class Report:
    def __init__(self, config_summary: dict, kernel_backend: str):
        self.config_summary = config_summary
        self.kernel_backend = kernel_backend
        self.records: list[CheckRecord] = []
        self.timings: dict[str, float] = {}

    def add(self, record: CheckRecord):
        self.records.append(record)

    def extend(self, records):
        self.records.extend(records)

    def counts(self):
        out = {"pass": 0, "fail": 0, "divergence": 0, "skip": 0}
        for r in self.records:
            out[r.status] = out.get(r.status, 0) + 1
        return out

    def exit_code(self, disputed: str = "fail") -> int:
        c = self.counts()
        hard = c["fail"] + (c["divergence"] if disputed == "fail" else 0)
        return 1 if hard else 0

    def to_json(self) -> str:
        payload = {
            "config": self.config_summary,
            "kernel_backend": self.kernel_backend,
            "counts": self.counts(),
            "records": [r.as_dict() for r in self.records],
        }
        return json.dumps(payload, sort_keys=True, indent=1) + "\n"

    def to_text(self) -> str:
        lines = []
        cfg = self.config_summary
        lines.append(
            "verification run  p=%s f=%s e=%s w=%s r=%s backend=%s kernels=%s seed=%s"
            % (
                cfg["p"],
                cfg["f"],
                cfg["e"],
                cfg["w"],
                cfg["r_vec"],
                cfg["backend"],
                self.kernel_backend,
                cfg["seed"],
            )
        )
        lines.append("-" * 78)
        current = None
        for r in self.records:
            if r.suite != current:
                current = r.suite
                timing = self.timings.get(current)
                suffix = f"  [{timing:.2f}s]" if timing is not None else ""
                lines.append(f"[{current}]{suffix}")
            mark = {
                "pass": "PASS",
                "fail": "FAIL",
                "divergence": "DIVERGES",
                "skip": "skip",
            }[r.status]
            lines.append(f"  {mark:9s} {r.name}: {r.law}")
            if r.status in ("fail", "divergence") and r.details:
                for dl in r.details.splitlines():
                    lines.append(f"            {dl}")
        c = self.counts()
        lines.append("-" * 78)
        lines.append(
            "totals: %d pass, %d fail, %d divergence, %d skip"
            % (c["pass"], c["fail"], c["divergence"], c["skip"])
        )
        if self.timings:
            lines.append("total time: %.2fs" % sum(self.timings.values()))
        return "\n".join(lines) + "\n"
