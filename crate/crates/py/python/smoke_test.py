"""Smoke test for the Python bindings.

Build and run from the workspace root:

    cargo build --release -p jordan-ext-py --features extension-module
    python3 crates/py/python/smoke_test.py

The script looks for the compiled library under target/release unless the
module is already importable (for instance after `maturin develop`).
"""

import importlib.util
import json
import math
import os
import pathlib
import shutil
import sys
import tempfile


def load_module():
    try:
        import jordan_ext_py

        return jordan_ext_py
    except ImportError:
        pass
    root = pathlib.Path(__file__).resolve().parents[3]
    target = pathlib.Path(os.environ.get("CARGO_TARGET_DIR", root / "target")) / "release"
    for name in ("libjordan_ext_py.so", "libjordan_ext_py.dylib", "jordan_ext_py.dll"):
        lib = target / name
        if lib.exists():
            break
    else:
        sys.exit(f"compiled module not found in {target}")
    tmp = pathlib.Path(tempfile.mkdtemp())
    suffix = ".pyd" if lib.suffix == ".dll" else ".so"
    dest = tmp / f"jordan_ext_py{suffix}"
    shutil.copy(lib, dest)
    spec = importlib.util.spec_from_file_location("jordan_ext_py", dest)
    module = importlib.util.module_from_spec(spec)
    spec.loader.exec_module(module)
    return module


def main():
    m = load_module()
    assert m.SCHEMA_VERSION == 1

    d = m.hyperbolic_dist_disk((0.0, 0.0), (0.5, 0.0))
    assert abs(d - math.log(3.0)) < 1e-12, d
    assert abs(m.hyperbolic_dist_halfplane((0.0, 1.0), (0.0, 5.0)) - math.log(5.0)) < 1e-12

    removed, closed = m.svc_removed_measure(12)
    assert abs(removed - closed) < 1e-12

    disk = {
        "vertices": [[math.cos(2 * math.pi * k / 256), math.sin(2 * math.pi * k / 256)] for k in range(256)],
        "resolution_hint": 0.02,
    }
    report = json.loads(m.criterion(json.dumps(disk), (0.0, 0.0), 0.01))
    assert abs(report["estimate"] - 1.5 * math.pi) < 0.05 * 1.5 * math.pi, report["estimate"]

    xs, ys, values = m.quasihyperbolic_field(json.dumps(disk), (0.0, 0.0), 0.05)
    assert len(xs) == len(ys) == len(values) > 0
    assert min(values) >= 0.0

    domain_json, phi_json = m.counterexample_domain(2)
    domain = json.loads(domain_json)
    assert len(domain["vertices"]) == len(domain["offsets"])
    assert json.loads(phi_json)["anchors"][0]["u"] == -1.0

    rep = json.loads(m.counterexample_report_json(2, seed=3, grid_check=False))
    assert rep["blowup"]["increment"] == 1.0
    assert rep["anchors"]["top_closes"]

    try:
        m.hyperbolic_dist_disk((2.0, 0.0), (0.0, 0.0))
    except ValueError:
        pass
    else:
        raise AssertionError("points outside the disk must raise")

    try:
        m.counterexample_domain(0)
    except ValueError:
        pass
    else:
        raise AssertionError("depth 0 must raise")

    assert m.run_cli(["counterexample", "--depth", "0"]) == 2
    print("python smoke test: ok")


if __name__ == "__main__":
    main()
