"""Reference benchmark data and reproduction reports.

Ships the published star-discrepancy tables as immutable reference
records, recomputes the reproducible columns through the generator and
evaluator modules, scans the (p_2, p_3) parameter landscape for heatmaps,
and derives inverse-discrepancy thresholds (smallest n reaching a target)
from any record collection.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from kronlow.discrepancy import star_discrepancy_exact
from kronlow.optimize import OptimizerConfig, optimize_kronecker
from kronlow.pointset import kronecker_with_unit_first, sobol_set

# Tuned interval parameter pairs (p2, p3) as published alongside the tables.
TUNED_PAIRS = {
    "i_200": (0.5494, 0.7867),
    "i_1500": (0.6193, 0.7830),
    "i_2500": (0.71810558, 0.81422429),
}

# Column tolerance used by reproduce_table1: absolute for the tuned columns
# (full-precision pair 1e-4, 4-decimal pairs 2e-3), relative-informational
# for Sobol' whose direction numbers differ between implementations.
COLUMN_TOLERANCE = {
    "i_200": ("abs", 2e-3),
    "i_1500": ("abs", 2e-3),
    "i_2500": ("abs", 1e-4),
    "sobol": ("rel", 0.30),
    "cmaes": ("rel", 0.30),
}

# Published best-found star discrepancy values for d = 3.
# Columns: sobol, cmaes, i_200, i_1500, i_2500, l2_subset (None = not reported).
_TABLE1_COLUMNS = ("sobol", "cmaes", "i_200", "i_1500", "i_2500", "l2_subset")
_TABLE1 = {
    20: (0.17742, 0.12221, 0.15029, 0.18194, 0.16935, 0.1202),
    25: (0.14742, 0.10066, 0.12738, 0.14555, 0.14618, 0.1012),
    32: (0.14917, 0.08813, 0.10094, 0.12083, 0.11420, 0.07931),
    40: (0.11167, 0.07292, 0.08273, 0.09666, 0.09221, 0.06392),
    50: (0.11276, 0.06371, 0.06986, 0.09356, 0.08682, 0.05337),
    60: (0.08052, 0.05799, 0.06166, 0.08021, 0.07639, 0.0606),
    80: (0.07862, 0.04709, 0.05099, 0.06199, 0.07525, 0.0547),
    100: (0.06057, 0.04017, 0.04325, 0.04996, 0.06020, 0.0374),
    150: (0.04062, 0.03009, 0.03489, 0.03331, 0.04014, 0.02499),
    200: (0.03654, 0.02474, 0.02762, 0.02592, 0.03010, 0.02181),
    250: (0.02645, 0.02023, 0.02210, 0.02158, 0.02408, 0.01837),
    300: (0.02686, 0.01826, 0.01849, 0.01969, 0.02241, None),
    500: (0.01524, 0.01115, 0.01402, 0.01252, 0.01344, 0.01125),
    750: (0.01236, 0.00826, 0.01014, 0.00904, 0.00915, None),
    1000: (0.00836, 0.00657, 0.00804, 0.00736, 0.00698, 0.0081),
    1250: (0.00853, None, 0.00770, 0.00650, 0.00592, None),
    1500: (0.00713, None, 0.00695, 0.00548, 0.00572, None),
    1750: (0.00649, None, 0.00677, 0.00545, 0.00474, None),
    2000: (0.00480, None, 0.00624, 0.00477, 0.00439, 0.00503),
    2500: (0.00501, None, 0.00593, 0.00382, 0.00365, None),
    3000: (0.00435, None, 0.00537, 0.00328, 0.00304, None),
    3500: (0.00383, None, 0.00520, 0.00314, 0.00268, None),
    4000: (0.00314, None, 0.00501, 0.00286, 0.00262, None),
    5000: (0.00264, None, 0.00485, 0.00241, 0.00210, None),
}

# Published post-processing comparison (d = 3); "_post" marks the value
# after the order-preserving post-processing step, which is out of scope
# here and kept as reference data only.
_TABLE2_COLUMNS = ("i_200", "i_200_post", "l2_subset", "l2_subset_post", "mpmc", "mpmc_post")
_TABLE2 = {
    25: (0.12738, 0.11029, 0.1012, 0.08519, 0.10664, 0.08335),
    32: (0.10094, 0.08956, 0.07931, 0.07309, 0.08234, 0.07085),
    40: (0.08273, 0.06082, 0.06392, 0.05988, 0.08139, 0.06242),
    50: (0.06986, 0.05420, 0.05337, 0.04979, 0.05828, 0.05067),
}

# Published values in 4 dimensions.
_TABLE3_COLUMNS = ("sobol", "cmaes", "rts", "irace_512")
_TABLE3 = {
    5: (0.28281, 0.34054, 0.34184, 0.43494263),
    8: (0.23438, 0.29388, 0.27840, 0.32895087),
    16: (0.13672, 0.17685, 0.19424, 0.24601968),
    20: (0.11172, 0.15750, 0.16216, 0.22276414),
    32: (0.08984, 0.12989, 0.12888, 0.1486705),
    50: (0.07994, 0.08886, 0.09975, 0.09884006),
    64: (0.05371, 0.07782, 0.08338, 0.10571434),
}

_REPRODUCIBLE_COLUMNS = ("sobol", "i_200", "i_1500", "i_2500")


@dataclass(frozen=True)
class BenchmarkRecord:
    """One (method, n, d) -> discrepancy row for tables and plots."""

    method: str
    n: int
    d: int
    value: float
    params: tuple | None = None
    provenance: str = "computed"
    citation: str = ""

    def to_dict(self) -> dict:
        return {
            "method": self.method,
            "n": self.n,
            "d": self.d,
            "value": self.value,
            "params": list(self.params) if self.params is not None else None,
            "provenance": self.provenance,
            "citation": self.citation,
        }


def _table_records(table: dict, columns: tuple, d: int, citation: str) -> list[BenchmarkRecord]:
    records = []
    for n in sorted(table):
        for method, value in zip(columns, table[n]):
            if value is None:
                continue
            records.append(
                BenchmarkRecord(
                    method=method,
                    n=n,
                    d=d,
                    value=value,
                    params=TUNED_PAIRS.get(method),
                    provenance="paper_reference",
                    citation=citation,
                )
            )
    return records


def reference_table(name: str) -> list[BenchmarkRecord]:
    """Published benchmark cells as immutable paper_reference records.

    ``name`` is one of "table1" (d=3 best-found values), "table3" (d=4),
    or "postprocessing_table2" (post-processing comparison, reference
    only; no generator for those methods exists here).
    """
    if name == "table1":
        return _table_records(_TABLE1, _TABLE1_COLUMNS, 3, "published results, d=3 table")
    if name == "table3":
        return _table_records(_TABLE3, _TABLE3_COLUMNS, 4, "published results, d=4 table")
    if name == "postprocessing_table2":
        return _table_records(_TABLE2, _TABLE2_COLUMNS, 3, "published post-processing table")
    raise ValueError(f"unknown reference table {name!r}")


def _compute_cell(method: str, n: int, cmaes_config: OptimizerConfig | None) -> tuple[float, tuple | None]:
    if method == "sobol":
        return star_discrepancy_exact(sobol_set(n, 3)).value, None
    if method in TUNED_PAIRS:
        pair = TUNED_PAIRS[method]
        return star_discrepancy_exact(kronecker_with_unit_first(n, *pair)).value, pair
    if method == "cmaes":
        config = cmaes_config or OptimizerConfig(budget_evals=2000, runs=3, seed=0)
        res = optimize_kronecker(n, 3, config)
        return res.best_value, tuple(float(p) for p in res.best_params)
    raise ValueError(f"column {method!r} is not reproducible")


def reproduce_table1(
    columns: Sequence[str] | None = None,
    ns: Sequence[int] | None = None,
    cmaes_config: OptimizerConfig | None = None,
) -> dict:
    """Recompute d=3 table cells and compare against the reference values.

    Only the generator-backed columns (sobol, i_200, i_1500, i_2500, and
    optionally cmaes with a local budget) can be requested.  Cells outside
    their column tolerance are flagged in the report, never fatal.
    """
    columns = list(columns) if columns is not None else list(_REPRODUCIBLE_COLUMNS)
    for c in columns:
        if c not in _REPRODUCIBLE_COLUMNS and c != "cmaes":
            raise ValueError(f"column {c!r} cannot be recomputed (reference-only)")
    ns = sorted(int(n) for n in ns) if ns is not None else sorted(_TABLE1)
    reference = {(r.method, r.n): r.value for r in reference_table("table1")}

    cells = []
    for method in columns:
        kind, tol = COLUMN_TOLERANCE[method]
        for n in ns:
            ref = reference.get((method, n))
            computed, params = _compute_cell(method, n, cmaes_config)
            delta = None if ref is None else computed - ref
            if ref is None:
                within = None
            elif kind == "abs":
                within = abs(delta) <= tol
            else:
                within = abs(delta) <= tol * ref
            cells.append(
                {
                    "column": method,
                    "n": n,
                    "computed": computed,
                    "reference": ref,
                    "delta": delta,
                    "tolerance": f"{kind}:{tol}",
                    "within_tolerance": within,
                    "params": list(params) if params else None,
                }
            )
    return {
        "table": "table1",
        "columns": columns,
        "ns": ns,
        "cells": cells,
        "flagged": [c for c in cells if c["within_tolerance"] is False],
    }


def table_report_csv_rows(report: dict) -> list[list]:
    rows = [["column", "n", "computed", "reference", "delta", "tolerance", "within_tolerance"]]
    for c in report["cells"]:
        rows.append(
            [
                c["column"],
                c["n"],
                repr(c["computed"]),
                "" if c["reference"] is None else repr(c["reference"]),
                "" if c["delta"] is None else repr(c["delta"]),
                c["tolerance"],
                "" if c["within_tolerance"] is None else c["within_tolerance"],
            ]
        )
    return rows


def heatmap_scan(n: int, resolution: int = 200, thresholds: Sequence[float] = (0.055, 0.045)) -> dict:
    """Discrepancy of shifted Kronecker sets (1/n, p2, p3) on a parameter grid.

    The grid takes cell centers (k + 0.5)/resolution in both coordinates,
    so every sampled pair lies strictly inside (0, 1)^2.  Returns the
    sampled rows (sorted by grid index), the grid minimum and its
    location, and per-threshold counts of cells at or below the value.
    """
    if resolution < 2:
        raise ValueError("resolution must be >= 2")
    cells = [(k + 0.5) / resolution for k in range(resolution)]
    rows = []
    vmin, argmin = 2.0, (None, None)
    counts = {float(t): 0 for t in thresholds}
    for p2 in cells:
        for p3 in cells:
            v = star_discrepancy_exact(kronecker_with_unit_first(n, p2, p3)).value
            rows.append((p2, p3, v))
            for t in counts:
                if v <= t:
                    counts[t] += 1
            if v < vmin:
                vmin, argmin = v, (p2, p3)
    return {
        "n": n,
        "resolution": resolution,
        "rows": rows,
        "minimum": vmin,
        "argmin": argmin,
        "threshold_counts": counts,
    }


def heatmap_csv_rows(report: dict) -> list[list]:
    rows = [["p2", "p3", "value"]]
    for p2, p3, v in report["rows"]:
        rows.append([repr(p2), repr(p3), repr(v)])
    return rows


def inverse_discrepancy(records: Sequence[BenchmarkRecord], targets: Sequence[float]) -> dict:
    """Smallest n per method whose recorded value reaches each target.

    Returns {method: {target: n or None}}; None means the target is not
    reached by any record of that method ("unreached" in reports).
    """
    by_method: dict[str, list[BenchmarkRecord]] = {}
    for r in records:
        by_method.setdefault(r.method, []).append(r)
    out: dict[str, dict[float, int | None]] = {}
    for method, recs in sorted(by_method.items()):
        recs = sorted(recs, key=lambda r: r.n)
        out[method] = {}
        for t in targets:
            hit = next((r.n for r in recs if r.value <= t), None)
            out[method][float(t)] = hit
    return out


def inverse_csv_rows(result: dict) -> list[list]:
    rows = [["method", "target", "min_n"]]
    for method in sorted(result):
        for t, n in sorted(result[method].items(), reverse=True):
            rows.append([method, repr(t), "unreached" if n is None else n])
    return rows
