#!/usr/bin/env python3
"""Smoke test for the delegation_py extension module.

Builds nothing itself: it locates the compiled cdylib under target/, copies
it into a temp dir under the importable name, and exercises the bindings
end to end. Run after `cargo build -p delegation-py`:

    python3 python/smoke_test.py
"""

import json
import shutil
import sys
import tempfile
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent


def load_module():
    candidates = [
        ROOT / "target" / "release" / "libdelegation_py.so",
        ROOT / "target" / "debug" / "libdelegation_py.so",
    ]
    built = [p for p in candidates if p.exists()]
    if not built:
        sys.exit("libdelegation_py.so not found; run `cargo build -p delegation-py` first")
    lib = max(built, key=lambda p: p.stat().st_mtime)
    stage = Path(tempfile.mkdtemp(prefix="delegation_py_"))
    shutil.copy2(lib, stage / "delegation_py.so")
    sys.path.insert(0, str(stage))
    import delegation_py

    return delegation_py


def main():
    d = load_module()

    # Deterministic solver on the diagonal family: with k items out of
    # n types, the provider extracts exactly k/n.
    inst = d.Instance.single_bad(3)
    assert inst.num_types == 3 and inst.num_actions == 3, repr(inst)
    value, menu = d.solve_det(inst, 2)
    assert value == "2/3", value
    assert menu.value(inst) == "2/3"
    assert len(menu.items()) == 2

    # The brute-force oracle agrees with the solver.
    oracle_value, pairs, oracle_menu = d.oracle(inst, 2)
    assert oracle_value == value, (oracle_value, value)
    assert pairs > 0
    assert oracle_menu.value(inst) == value

    # Menus survive a JSON round trip.
    menu2 = d.Menu.from_json(menu.to_json(inst), inst)
    assert menu2.items() == menu.items()

    # Exact verification reports zero slack for an exactly optimal menu.
    report = d.verify(inst, menu)
    assert report["user_ic_slack"] == "0", report
    assert report["provider_slack"] == "0", report
    assert report["unpriceable_items"] == []

    # The unrestricted randomized relaxation prices the full diagonal menu.
    rand_value, rand_menu_json = d.solve_rand(d.Instance.single_bad(2))
    assert rand_value == "1", rand_value
    assert json.loads(rand_menu_json)["kind"] == "randomized"

    # Robustification discounts prices and reports an explicit guarantee.
    robust = d.robustify(inst, menu, "1/100")
    assert robust["alpha"] == "1/10"
    assert robust["eps_out"] == "1/10"
    assert robust["menu"].value(inst) != ""

    # Continuous pipeline on the built-in one-parameter family.
    cont = d.solve_cont("1/16")
    assert cont["relaxed_value"] == "9/16", cont["relaxed_value"]
    assert cont["provider_slack"] == "4892766953/5000000000", cont["provider_slack"]
    grid_inst = cont["instance"]
    kept = d.verify(grid_inst, cont["menu"])
    assert kept["unpriceable_items"] == []

    # Instances round-trip through JSON and the hardness generator scales.
    back = d.Instance.from_json(inst.to_json())
    assert back.to_json() == inst.to_json()
    hard, beta = d.Instance.hardness(2, [])
    assert beta == "1/120", beta
    assert hard.num_types == 4

    # Seeded generation is reproducible.
    a = d.Instance.random(2, 2, 2, 7).to_json()
    b = d.Instance.random(2, 2, 2, 7).to_json()
    assert a == b

    print("smoke test passed: instances, solvers, oracle, robustify, continuous, json")


if __name__ == "__main__":
    main()
