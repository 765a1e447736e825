#!/usr/bin/env python3
"""Solve LP files with HiGHS and write `name value` solution files.

Usage: solve_lp_highs.py FILE.lp [FILE.lp ...]

Each FILE.lp produces FILE.sol next to it, starting with a
`# objective <value>` comment. Exits nonzero unless every model is
solved to optimality.
"""

import sys
from pathlib import Path

import highspy


def solve(path: Path) -> float:
    h = highspy.Highs()
    h.setOptionValue("output_flag", False)
    h.setOptionValue("mip_rel_gap", 0.0)
    h.setOptionValue("mip_abs_gap", 0.0)
    h.setOptionValue("random_seed", 0)
    h.setOptionValue("threads", 1)
    if h.readModel(str(path)) != highspy.HighsStatus.kOk:
        raise RuntimeError(f"{path}: cannot read model")
    h.run()
    status = h.getModelStatus()
    if status != highspy.HighsModelStatus.kOptimal:
        raise RuntimeError(f"{path}: {h.modelStatusToString(status)}")
    lp = h.getLp()
    values = h.getSolution().col_value
    objective = h.getInfo().objective_function_value
    lines = [f"# objective {objective:.6f}"]
    for name, value in zip(lp.col_names_, values):
        v = round(value)
        lines.append(f"{name} {v if abs(value - v) < 1e-6 else value}")
    path.with_suffix(".sol").write_text("\n".join(lines) + "\n")
    return objective


def main() -> int:
    if len(sys.argv) < 2:
        print(__doc__, file=sys.stderr)
        return 2
    failed = 0
    for arg in sys.argv[1:]:
        try:
            print(f"{arg}: {solve(Path(arg)):.6f}")
        except RuntimeError as e:
            print(f"error: {e}", file=sys.stderr)
            failed += 1
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
