"""Smoke test for the cimdcsk_py extension module.

Build and run from the repository root:

    cargo build --release -p cimdcsk-py --features extension-module
    cp target/release/libcimdcsk_py.so crates/py/python/cimdcsk_py.so
    python3 crates/py/python/smoke_test.py
"""

import math
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent))

import cimdcsk_py as cd  # noqa: E402

CONFIG = """
name = "smoke"
master_seed = 3

[grid]
ebn0_db = [10.0, 15.0]

[stop]
min_bit_errors = 200
max_frames = 5000
"""


def main():
    assert cd.spectral_efficiency(4, 4) == 2.5
    assert "fig4a" in cd.PRESETS

    t = cd.theory(20.0)
    assert abs(t["p_sys"] - 2.887e-3) / 2.887e-3 < 1e-2, t
    assert 0.0 < t["p_shr"] < 1e-5, t

    rows = cd.simulate(CONFIG, workers=1)
    assert [r["ebn0_db"] for r in rows] == [10.0, 15.0]
    for r in rows:
        assert r["errors"] >= 200 or r["frames"] == 5000
        assert 0.5 < r["ber_sim"] / r["ber_theory"] < 2.0, r
    assert rows == cd.simulate(CONFIG, workers=2)

    assert any("phi" in c for c in cd.preset("fig6"))
    try:
        cd.theory(20.0, n=3)
    except ValueError:
        pass
    else:
        raise AssertionError("N=3 accepted")
    assert not math.isnan(rows[0]["ber_cim_sim"])
    print("smoke test passed")


if __name__ == "__main__":
    main()
