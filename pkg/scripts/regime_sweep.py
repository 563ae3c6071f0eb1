#!/usr/bin/env python3
"""Map classifier regimes over an (a1, a2) grid and audit them by simulation.

With b = (2, 1) and c = (1, 2) the grid crosses both decision lines
a1/a2 = 2 and a1/a2 = 1/2, so the sweep covers exclusion in both
directions, coexistence between the lines, and the Unresolved rows on
the lines themselves. Usage: regime_sweep.py [out_dir].
"""

import json
import os
import sys
import tempfile

from graphlv.cli import main as cli_main

DOC = {
    "graph": {
        "vertices": ["x1", "x2", "x3"],
        "edges": [["x1", "x2", 1.0], ["x2", "x3", 1.0], ["x1", "x3", 1.0]],
    },
    "bc": "none",
    "params": {"a1": 1.0, "b1": 2.0, "c1": 1.0, "a2": 1.0, "b2": 1.0, "c2": 2.0},
    "initial": {"u": 1.0, "v": 1.0},
    "sweep": {
        "grid": {
            "a1": {"start": 0.5, "stop": 2.5, "count": 11},
            "a2": {"start": 0.5, "stop": 2.5, "count": 11},
        },
        "t_end": 200.0,
        "tol": 1e-2,
        "max_points": 200,
    },
}


def main() -> int:
    out = sys.argv[1] if len(sys.argv) > 1 else "sweep_out"
    fd, path = tempfile.mkstemp(suffix=".json")
    try:
        with os.fdopen(fd, "w") as fh:
            json.dump(DOC, fh)
        return cli_main(["sweep", "--config", path, "--out", out])
    finally:
        os.unlink(path)


if __name__ == "__main__":
    sys.exit(main())
