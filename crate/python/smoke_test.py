#!/usr/bin/env python3
"""Smoke test for the bmolab_py extension module.

Builds the cdylib with cargo, loads it as a Python module, and checks a
handful of identities end to end: Luxembourg closed forms, the unit
modular identity, semigroup exactness, the box/sawtooth counterexample,
and a seminorm equivalence ratio.
"""

import math
import shutil
import subprocess
import sys
import tempfile
from pathlib import Path

REPO = Path(__file__).resolve().parent.parent


def build_extension() -> Path:
    subprocess.run(
        ["cargo", "build", "--release", "-p", "bmolab-py"],
        cwd=REPO,
        check=True,
    )
    built = REPO / "target" / "release" / "libbmolab_py.so"
    if not built.exists():  # macOS fallback
        built = REPO / "target" / "release" / "libbmolab_py.dylib"
    stage = Path(tempfile.mkdtemp(prefix="bmolab_py_"))
    shutil.copy(built, stage / "bmolab_py.so")
    return stage


def approx(a, b, rel=1e-6, label=""):
    if abs(a - b) > rel * max(abs(b), 1e-12):
        raise AssertionError(f"{label}: {a} vs {b} (rel {rel})")


def main() -> int:
    sys.path.insert(0, str(build_extension()))
    import bmolab_py as bm

    grid = bm.Grid(1, 2.0, 1024)
    assert len(grid) == 1024
    approx(grid.spacing, 2.0 / 1024, label="spacing")

    # Luxembourg norm closed form: ||chi_B|| = mu(B)^{1/p}
    ball = bm.Ball(grid, 100, 0.25)
    mu = ball.measure(grid)
    phi_half = bm.GrowthFunction.power(0.5)
    approx(bm.indicator_norm(phi_half, grid, ball), mu ** 2, 1e-9, "indicator norm")

    # unit modular identity on a corpus member
    f = bm.GridFunction.corpus_member(grid, "log_profile")
    phi = bm.GrowthFunction.power(1.0)
    norm = bm.luxembourg_norm(phi, f, 1e-4)
    approx(bm.modular(phi, f, norm), 1.0, 1e-3, "unit modular")

    # norm of |cos| under phi = t is 4/pi
    mode = bm.GridFunction.corpus_member(grid, "single_mode")
    approx(bm.luxembourg_norm(phi, mode), 4.0 / math.pi, 1e-2, "single mode norm")

    # semigroup: poisson exact, box not
    poisson = bm.KernelOp.poisson()
    comp, mass = bm.semigroup_check(poisson, mode, 0.1, 0.1)
    assert comp <= 1e-6 and mass <= 1e-6, (comp, mass)
    box = bm.KernelOp.box_kernel(1.0)
    comp_box, _ = bm.semigroup_check(box, mode, 0.1, 0.1)
    assert comp_box > 1e-3, comp_box

    # kernels preserve constants
    one = bm.GridFunction(grid, [1.0] * len(grid))
    smoothed = poisson.apply(one, 0.05)
    assert max(abs(v - 1.0) for v in smoothed.values()) < 1e-9

    # the sawtooth jump at the wrap seam carries classical oscillation
    saw = bm.GridFunction.corpus_member(grid, "sawtooth")
    menu = bm.BallMenu.standard(grid, 16)
    classical = bm.bmo_phi(saw, phi, menu)
    assert classical >= 0.1 * grid.side_length, classical

    # p-mean equivalence window on the log profile
    a1 = bm.bmo_phi_a(f, phi, poisson, menu)
    a2 = bm.bmo_phi_a_p(f, phi, poisson, menu, 2.0)
    t2 = bm.bmo_tilde_p(f, phi, poisson, menu, 2.0)
    assert 1.0 <= a2 / a1 <= 10.0, (a1, a2)
    approx(t2, a2, 1e-9, "tilde vs p-mean under plain growth")

    # level-set curve is nonincreasing
    big = bm.Ball(grid, 0, 0.25)
    lambdas = [0.05 * 1.3 ** k for k in range(30)]
    measures = bm.jn_distribution(f, phi, poisson, big, lambdas, a1)
    assert all(x >= y for x, y in zip(measures, measures[1:])), "monotone curve"

    # Carleson norm of a constant vanishes; of the profile it does not
    t_grid = bm.default_t_grid(grid)
    assert bm.phi_carleson_norm(one, phi, poisson, menu, t_grid) < 1e-12
    carleson = bm.phi_carleson_norm(f, phi, poisson, menu, t_grid)
    assert carleson > 0.0
    print("smoke test PASS")
    print(f"  classical(sawtooth)      = {classical:.4f}")
    print(f"  kernel seminorm(log)     = {a1:.4f}")
    print(f"  p=2 / p=1 ratio          = {a2 / a1:.4f}")
    print(f"  carleson(log)            = {carleson:.4f}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
