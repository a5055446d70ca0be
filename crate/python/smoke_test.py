"""Smoke test for the borel_qmt Python extension.

Run after `maturin develop -m crates/python/Cargo.toml --release`, or after
`cargo build --release -p borel-qmt-py --features extension-module`, in which
case the shared library is picked up from target/release.
"""

import json
import math
import pathlib
import shutil
import sys
import tempfile


def import_extension():
    try:
        import borel_qmt

        return borel_qmt
    except ImportError:
        pass
    root = pathlib.Path(__file__).resolve().parent.parent
    for name in ("libborel_qmt.so", "libborel_qmt.dylib", "borel_qmt.dll"):
        lib = root / "target" / "release" / name
        if lib.exists():
            tmp = pathlib.Path(tempfile.mkdtemp())
            suffix = ".pyd" if name.endswith(".dll") else ".so"
            shutil.copy(lib, tmp / f"borel_qmt{suffix}")
            sys.path.insert(0, str(tmp))
            import borel_qmt

            return borel_qmt
    sys.exit("borel_qmt extension not found; build it first (see module docstring)")


def close(a, b, rel):
    return abs(a - b) <= rel * abs(b)


def main():
    bq = import_extension()

    s = bq.Series.from_model("quartic", "E", 100)
    assert s.order == 100 and len(s) == 101
    assert s.coefficients[:6] == ["1/2", "3/4", "21/8", "333/16", "30885/128", "916731/256"]
    assert bq.Series.from_json(s.to_json()).coefficients == s.coefficients

    fit = json.loads(bq.fit(s))
    assert fit["alpha"] == 1 and close(fit["a_inverse"], 3.0, 0.01) and close(fit["beta"], 0.5, 0.05)

    energy, metric, _ = bq.diag("quartic", 1.0, 1.0)
    assert close(energy, 0.8037706512342738, 1e-12)
    assert metric[0][1] == metric[1][0]

    resummed = bq.resum_physical("quartic", "E", 1.0, 1.0, order=100)
    assert close(resummed, energy, 1e-6), (resummed, energy)
    bare = bq.resum(s, 1.0)
    assert close(bare["value"], energy, 1e-6)

    g11 = bq.resum_physical("quartic", "g11", 1.0, 1.0, order=100)
    assert close(g11, metric[0][0], 1e-3), (g11, metric[0][0])

    poles = bq.pade_poles(s, order=100, borel=True)
    nearest = max(re for re, im, cls in poles if cls == "physical-negative-real")
    assert close(nearest, -1.0 / 3.0, 0.01), nearest

    fd = bq.qmt_finite_difference("quartic", 1.0, 0.5, h=1e-4, basis=80)
    _, exact, _ = bq.diag("quartic", 1.0, 0.5, basis=80)
    assert all(close(fd[i][j], exact[i][j], 1e-6) for i in range(2) for j in range(2))

    csv = bq.figure("fig4", orders=[30])
    assert csv.startswith("# schema: " + bq.SCHEMA)

    assert bq.verify_tables() == []

    try:
        bq.Series.from_model("octic", "E", 10)
    except ValueError:
        pass
    else:
        raise AssertionError("unknown model accepted")

    assert math.isfinite(bq.pade("quartic", "E", 1.0, 1.0, order=40))
    print("python smoke test: OK")


if __name__ == "__main__":
    main()
