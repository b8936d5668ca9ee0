"""Run reports for scored counts files."""

from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass, field

from . import __version__
from .countsfile import counts_digest
from .stats import (
    CountsTable,
    NoSignalingReport,
    no_signaling_test,
    score_all_spectators,
    score_dataset,
)
from .witness import WitnessReport

# witnesses are quoted in these units
UNITS = {"A": 1e-6, "B": 1e-12}
UNIT_LABELS = {"A": "1e-6", "B": "1e-12"}


@dataclass(frozen=True)
class RunReport:
    kind: str
    measurement_set: str
    witness: WitnessReport
    nosignal: NoSignalingReport | None
    spectators: dict = field(default_factory=dict)
    digest: str = ""
    version: str = __version__
    wall_clock: float = 0.0

    def rows(self) -> list[tuple[str, WitnessReport]]:
        if self.kind == "B":
            return [(f"a0={s[0]} b0={s[1]}", r) for s, r in self.spectators.items()]
        return [(self.measurement_set, self.witness)]

    def to_text(self) -> str:
        unit = UNITS[self.kind]
        lines = [
            f"schmidt-witness {self.version}",
            f"input sha256 {self.digest}",
            f"kind {self.kind}  set {self.measurement_set}  N {self.witness.nShots}  jobs {self.witness.jobCount}",
            f"units: witnesses in {UNIT_LABELS[self.kind]}",
            f"{'row':<14}{'W':>12}{'dW':>12}{'W/dW':>9}{'Wp':>12}{'dWp':>12}{'Wp/dWp':>9}",
        ]
        for name, r in self.rows():
            lines.append(
                f"{name:<14}{r.W / unit:>12.4f}{r.deltaW / unit:>12.4f}{_z(r.zScore):>9}"
                f"{r.Wprime / unit:>12.4f}{r.deltaWprime / unit:>12.4f}{_z(r.zScorePrime):>9}"
                + ("" if r.reliable else "  (error estimate unreliable)")
            )
        lines.append("raw values:")
        for name, r in self.rows():
            lines.append(
                f"  {name}: W={r.W:.9e} dW={r.deltaW:.9e} Wp={r.Wprime:.9e} dWp={r.deltaWprime:.9e}"
            )
        if self.nosignal is not None:
            ns = self.nosignal
            w = ns.worst()
            lines.append(
                f"no-signaling: {ns.count} comparisons, max |z| {ns.max_abs_z:.3f} ({w.label()}), "
                f"Bonferroni p {ns.bonferroni_p:.4g}"
            )
        lines.append(f"wall-clock {self.wall_clock:.3f} s")
        return "\n".join(lines) + "\n"

    def to_dict(self) -> dict:
        def wr(r: WitnessReport) -> dict:
            return {
                "W": r.W, "deltaW": r.deltaW, "Wprime": r.Wprime, "deltaWprime": r.deltaWprime,
                "z": _num(r.zScore), "zprime": _num(r.zScorePrime),
                "nShots": r.nShots, "jobCount": r.jobCount, "reliable": r.reliable,
            }

        out = {
            "version": self.version,
            "digest": self.digest,
            "kind": self.kind,
            "set": self.measurement_set,
            "unit": UNITS[self.kind],
            "witness": wr(self.witness),
            "wall_clock": self.wall_clock,
        }
        if self.kind == "B":
            out["spectators"] = {f"{s[0]}{s[1]}": wr(r) for s, r in self.spectators.items()}
        if self.nosignal is not None:
            out["nosignal"] = {
                "comparisons": self.nosignal.count,
                "max_abs_z": self.nosignal.max_abs_z,
                "bonferroni_p": self.nosignal.bonferroni_p,
            }
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"


def _z(z: float) -> str:
    return "nan" if math.isnan(z) else f"{z:.2f}"


def _num(x: float):
    return None if math.isnan(x) else x


def build_report(table: CountsTable) -> RunReport:
    start = time.perf_counter()
    if table.kind == "A":
        w = score_dataset(table, label=table.measurement_set)
        ns = no_signaling_test(table)
        spect = {}
    else:
        spect = score_all_spectators(table)
        w = spect[(0, 0)]
        ns = None
    digest = counts_digest(table)
    return RunReport(
        table.kind, table.measurement_set, w, ns, spect, digest, __version__, time.perf_counter() - start
    )


def nosignal_table(report: NoSignalingReport) -> str:
    lines = [f"{'comparison':<28}{'first':>10}{'second':>10}{'z':>9}"]
    for c in report.comparisons:
        lines.append(f"{c.label():<28}{c.estimate_a:>10.5f}{c.estimate_b:>10.5f}{c.z:>9.3f}")
    lines.append(
        f"{report.count} comparisons, max |z| {report.max_abs_z:.3f}, Bonferroni p {report.bonferroni_p:.4g}"
    )
    return "\n".join(lines) + "\n"


def matrix_csv(entries) -> str:
    return "\n".join(",".join(f"{v:.10g}" for v in row) for row in entries) + "\n"
