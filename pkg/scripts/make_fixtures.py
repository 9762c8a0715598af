"""Generate the benchmark-scale .sm fixture files committed under tests/fixtures.

Instances follow the PSPLib single-mode layout at j30 scale: 30 real jobs
between dummy source/sink, 4 renewable resources.  Run from the repo root:

    python3 scripts/make_fixtures.py
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

N_REAL = 30
N_RES = 4


def make_instance_text(seed: int) -> str:
    rng = np.random.default_rng(seed)
    n = N_REAL + 2
    caps = [int(rng.integers(10, 15)) for _ in range(N_RES)]

    durations = [0] + [int(rng.integers(1, 11)) for _ in range(N_REAL)] + [0]
    demands = [[0] * N_RES]
    for _ in range(N_REAL):
        row = [0] * N_RES
        for r in rng.choice(N_RES, size=int(rng.integers(1, 3)), replace=False):
            row[r] = int(rng.integers(1, max(2, caps[r] // 2 + 1)))
        demands.append(row)
    demands.append([0] * N_RES)

    successors: list[list[int]] = [[] for _ in range(n)]
    for j in range(1, N_REAL):  # real jobs 1..29 (0-based), forward edges only
        n_succ = int(rng.integers(1, 4))
        pool = list(range(j + 1, N_REAL + 1))
        chosen = sorted(rng.choice(pool, size=min(n_succ, len(pool)), replace=False))
        successors[j] = [int(c) for c in chosen]
    has_pred = {s for succ in successors for s in succ}
    successors[0] = sorted(j for j in range(1, N_REAL + 1) if j not in has_pred)
    for j in range(1, N_REAL + 1):
        if not successors[j]:
            successors[j] = [n - 1]

    lines = []
    bar = "*" * 72
    lines.append(bar)
    lines.append(f"file with basedata            : fixture_{seed}.bas")
    lines.append(f"initial value random generator: {seed}")
    lines.append(bar)
    lines.append("projects                      :  1")
    lines.append(f"jobs (incl. supersource/sink ):  {n}")
    lines.append(f"horizon                       :  {sum(durations)}")
    lines.append("RESOURCES")
    lines.append(f"  - renewable                 :  {N_RES}   R")
    lines.append("  - nonrenewable              :  0   N")
    lines.append("  - doubly constrained        :  0   D")
    lines.append(bar)
    lines.append("PROJECT INFORMATION:")
    lines.append("pronr.  #jobs rel.date duedate tardcost  MPM-Time")
    lines.append(f"    1     {N_REAL}      0       {sum(durations) // 2}       0       {sum(durations) // 2}")
    lines.append(bar)
    lines.append("PRECEDENCE RELATIONS:")
    lines.append("jobnr.    #modes  #successors   successors")
    for j in range(n):
        succ = "   ".join(str(s + 1) for s in successors[j])
        lines.append(f"{j + 1:4d}        1          {len(successors[j])}           {succ}".rstrip())
    lines.append(bar)
    lines.append("REQUESTS/DURATIONS:")
    lines.append("jobnr. mode duration  " + "  ".join(f"R {r + 1}" for r in range(N_RES)))
    lines.append("-" * 72)
    for j in range(n):
        req = "    ".join(str(q) for q in demands[j])
        lines.append(f"{j + 1:3d}      1    {durations[j]:2d}       {req}")
    lines.append(bar)
    lines.append("RESOURCEAVAILABILITIES:")
    lines.append("  " + "  ".join(f"R {r + 1}" for r in range(N_RES)))
    lines.append("   " + "   ".join(str(c) for c in caps))
    lines.append(bar)
    return "\n".join(lines) + "\n"


def main() -> None:
    out_dir = Path(__file__).resolve().parents[1] / "tests" / "fixtures"
    out_dir.mkdir(parents=True, exist_ok=True)
    for seed in range(1, 6):
        path = out_dir / f"sched30_{seed}.sm"
        path.write_text(make_instance_text(seed))
        print(f"wrote {path}")


if __name__ == "__main__":
    main()
