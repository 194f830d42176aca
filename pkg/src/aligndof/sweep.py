"""DoF-versus-axis tables for figure-style comparisons."""
from __future__ import annotations

import csv
import io
import json
import os
import re
from dataclasses import dataclass, replace
from fractions import Fraction

from .dofcalc import DEFAULT_STAGES, optimal_bounds, plan

AXES = ("K", "M_r", "N_t", "L")
_AXIS_ALIASES = {"K": "K", "L": "L", "M": "M_r", "Mr": "M_r", "M_r": "M_r",
                 "N": "N_t", "Nt": "N_t", "N_t": "N_t"}

CSV_HEADER = ("axis", "L", "K", "Mr", "Nt", "D_proposed", "D_proposed_exact", "D_UB",
              "COS", "Lee", "LCell", "D_decom", "D_proper", "region")

_SWEEP_RE = re.compile(r"^\s*(\w+)\s*=\s*(\d+)\s*\.\.\s*(\d+)\s*$")


@dataclass(frozen=True)
class SweepSpec:
    axis: str
    lo: int
    hi: int
    L: int = 2
    K: int = 2
    M_r: int = 6
    N_t: int = 6
    trials: int = 0
    seed: int = 0
    out: str | None = None
    format: str = "csv"
    max_stages: int = DEFAULT_STAGES

    def __post_init__(self):
        if self.axis not in AXES:
            raise ValueError(f"unknown sweep axis {self.axis!r}; choose from {AXES}")
        if self.lo > self.hi:
            raise ValueError(f"empty sweep range {self.lo}..{self.hi}")
        if self.lo < 1:
            raise ValueError("sweep values must be >= 1")
        if self.trials < 0:
            raise ValueError("trials must be >= 0")
        if self.format not in ("csv", "json"):
            raise ValueError(f"unknown format {self.format!r}")

    def points(self):
        for value in range(self.lo, self.hi + 1):
            yield replace(self, **{self.axis: value})


def parse_sweep(text):
    """Parse ``"K=2..16"`` into ``(axis, lo, hi)``."""
    m = _SWEEP_RE.match(text)
    if not m:
        raise ValueError(f"sweep must look like AXIS=LO..HI, got {text!r}")
    name, lo, hi = m.groups()
    if name not in _AXIS_ALIASES:
        raise ValueError(f"unknown sweep axis {name!r}")
    return _AXIS_ALIASES[name], int(lo), int(hi)


def dec(x):
    return "" if x is None else f"{float(x):.15g}"


def exact(x):
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def point_row(L, K, M_r, N_t, axis="", max_stages=DEFAULT_STAGES):
    """All comparison quantities for one configuration, as exact values."""
    p = plan(L, K, M_r, N_t, max_stages)
    b = optimal_bounds(L, K, M_r, N_t)
    return {"axis": axis, "L": L, "K": K, "Mr": M_r, "Nt": N_t,
            "plan": p, "D_proposed": p.D, "D_UB": b.D_UB,
            "COS": b.baselines.COS, "Lee": b.baselines.Lee, "LCell": b.baselines.LCell,
            "D_decom": b.D_decom, "D_proper": b.D_proper, "region": b.region.value}


def run_sweep(spec, verifier=None):
    """Rows in ascending axis order.

    ``verifier(L, K, M_r, N_t, trials, seed)`` optionally returns a
    ``(passed, trials)`` pair that is attached to each row.
    """
    rows = []
    for pt in spec.points():
        row = point_row(pt.L, pt.K, pt.M_r, pt.N_t, spec.axis, spec.max_stages)
        if verifier is not None and spec.trials > 0:
            row["verify"] = verifier(pt.L, pt.K, pt.M_r, pt.N_t, spec.trials, spec.seed)
        rows.append(row)
    return rows


def csv_fields(row):
    return [row["axis"], row["L"], row["K"], row["Mr"], row["Nt"], dec(row["D_proposed"]),
            exact(row["D_proposed"]), dec(row["D_UB"]), dec(row["COS"]), dec(row["Lee"]),
            dec(row["LCell"]), dec(row["D_decom"]), dec(row["D_proper"]), row["region"]]


def to_csv(rows):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for row in rows:
        writer.writerow(csv_fields(row))
    return buf.getvalue()


def to_json(rows):
    out = []
    for row in rows:
        item = {"axis": row["axis"], "L": row["L"], "K": row["K"], "Mr": row["Mr"],
                "Nt": row["Nt"], "D_proposed": exact(row["D_proposed"]),
                "D_UB": None if row["D_UB"] is None else exact(row["D_UB"]),
                "COS": exact(row["COS"]),
                "Lee": None if row["Lee"] is None else exact(row["Lee"]),
                "LCell": exact(row["LCell"]), "D_decom": exact(row["D_decom"]),
                "D_proper": exact(row["D_proper"]), "region": row["region"],
                "plan": row["plan"].as_dict()}
        if "verify" in row:
            passed, trials = row["verify"]
            item["verify_passed"], item["verify_trials"] = passed, trials
        out.append(item)
    return json.dumps(out, indent=2) + "\n"


PLOT_TEMPLATE = '''"""Plot DoF curves from {csv_name}. Generated by `aligndof sweep --plot`."""
import csv
import sys

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

CURVES = ["D_proposed", "D_UB", "COS", "Lee", "LCell", "D_decom", "D_proper"]
AXIS_COLUMN = {{"K": "K", "L": "L", "M_r": "Mr", "N_t": "Nt"}}


def main(path={csv_path!r}, out={png_path!r}):
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    axis = rows[0]["axis"]
    xs = [int(r[AXIS_COLUMN[axis]]) for r in rows]
    fig, ax = plt.subplots(figsize=(6, 4))
    for name in CURVES:
        pts = [(x, float(r[name])) for x, r in zip(xs, rows) if r[name] != ""]
        if pts:
            ax.plot(*zip(*pts), marker="o", label=name)
    ax.set_xlabel(axis)
    ax.set_ylabel("total DoF")
    ax.grid(True, alpha=0.3)
    ax.legend()
    fig.tight_layout()
    fig.savefig(out, dpi=150)


if __name__ == "__main__":
    main(*sys.argv[1:])
'''


def plot_script(csv_path, png_path):
    return PLOT_TEMPLATE.format(csv_name=os.path.basename(csv_path), csv_path=csv_path,
                                png_path=png_path)
