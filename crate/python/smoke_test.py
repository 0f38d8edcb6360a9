#!/usr/bin/env python3
"""Smoke test for the semiwave_py extension module.

Build the cdylib first:

    cargo build --release -p semiwave-py

then run this script; it copies the shared library next to itself under
the importable module name and exercises a few known values.
"""

import math
import pathlib
import shutil
import sys

ROOT = pathlib.Path(__file__).resolve().parents[1]


def locate_library() -> pathlib.Path:
    names = ["libsemiwave_py.so", "semiwave_py.dll", "libsemiwave_py.dylib"]
    for profile in ("release", "debug"):
        for name in names:
            p = ROOT / "target" / profile / name
            if p.exists():
                return p
    sys.exit("build the extension first: cargo build --release -p semiwave-py")


def main() -> None:
    lib = locate_library()
    dest = pathlib.Path(__file__).parent / "semiwave_py.so"
    if not dest.exists() or lib.stat().st_mtime > dest.stat().st_mtime:
        shutil.copyfile(lib, dest)
    sys.path.insert(0, str(dest.parent))

    import semiwave_py as sw

    # Null-condition algebra.
    f = sw.Nonlinearity.preset("simplestEx")
    assert f.n_total == 2
    holds, witness = f.check_null_condition()
    assert not holds and witness is not None
    omega, _x, y = witness
    assert omega == [1.0, 0.0, 0.0] and y == [1.0, 1.0]
    red = f.eval_reduced([1.0, 0.0, 0.0], [0.0, 0.0], [1.0, 1.0])
    assert abs(red[0] - 1.0) < 1e-12 and abs(red[1]) < 1e-12

    null = sw.Nonlinearity.preset("null_demo")
    assert null.check_null_condition()[0]

    # Spectral classification of the presets.
    assert f.classify(800, 0) == "positive_real_part"
    assert sw.Nonlinearity.preset("LogEx").classify(800, 0) == "nilpotent_log_growth"
    assert sw.Nonlinearity.preset("RotEx").classify(800, 0) == "imaginary_rotation"

    # Matrix exponential: rotation block.
    a = 0.7
    e = sw.matrix_exp([[0.0, a], [-a, 0.0]])
    assert abs(e[0][0] - math.cos(a)) < 1e-12
    assert abs(e[0][1] - math.sin(a)) < 1e-12

    # Rank-one exponential with orthogonal p, q.
    out = sw.rank_one_exp([1.0, 0.0], [0.0, 1.0], 1.0, [1.0, 0.0])
    assert abs(out[0] - 1.0) < 1e-12 and abs(out[1] - 1.0) < 1e-12

    # Reduced system: ∂τP = −P²/2 from P0 = 1 has P(1) = 2/3.
    dtu2 = sw.Nonlinearity.preset("dtu2")
    p_final, blowup = dtu2.integrate_reduced_constant([1.0], 1.0, 1e-3)
    assert blowup is None and abs(p_final[0] - 2.0 / 3.0) < 1e-8
    _, blowup = dtu2.integrate_reduced_constant([-1.0], 3.0, 1e-3)
    assert blowup is not None and abs(blowup - 2.0) < 2e-3

    # Prescribed radiation field hits its target values.
    f0, df0 = sw.prescribed_field(1.0, 0.8, -0.25, 1.0)
    assert abs(f0 - 0.8) < 1e-9 and abs(df0 + 0.25) < 1e-9

    # Huygens: the free wave vanishes off the light shell.
    assert sw.prescribed_wave(1.0, 0.8, 0.0, 6.0, [1.0, 0.0, 0.0]) == 0.0

    print("semiwave_py smoke test: ok")


if __name__ == "__main__":
    main()
