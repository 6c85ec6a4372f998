"""Smoke test for the flatpoint extension module."""

import json
import math

import flatpoint

FLAT = {
    "p": {"kind": "series", "coefficients": [[1.0, 0.0]]},
    "q": {"kind": "series", "coefficients": [[0.0, 0.0], [0.0, 0.0], [0.4, 0.0]]},
    "domain_radius": 0.9,
}


def main():
    report = json.loads(flatpoint.hexagon_report(numeric=False))
    expected = 16 * math.pi**4 / 81
    assert abs(abs(report["kpp_closed"]) - expected) <= 1e-12 * expected, report

    mesh = flatpoint.hexagon_mesh(2, 6, 0.5, "obj")
    assert sum(line.startswith("v ") for line in mesh.splitlines()) == 13

    data = json.dumps(FLAT)
    kpp = json.loads(flatpoint.kpp(data, numeric=False))["kpp_closed"]
    assert abs(abs(kpp) - 2.56) <= 1e-13, kpp
    assert flatpoint.curvature(data, 0j) == 0.0
    assert flatpoint.curvature(data, 0.3 + 0.1j) < 0.0

    try:
        flatpoint.kpp("{}")
    except ValueError:
        pass
    else:
        raise AssertionError("malformed data accepted")

    spec = json.dumps({"target": "disk", "epsilons": [0.05], "symmetry_order": 6})
    family = json.loads(flatpoint.rkc(spec, numeric=False))
    assert family["q0"] == [0.0, 0.0]
    assert family["margin_flat"] > 0.0 and family["hall_lhs"] >= family["hall_rhs"]

    batch = json.loads(flatpoint.rkc_batch(3, count=4, numeric=False))
    assert batch["admissible"] == 4 and not batch["violations"]
    assert batch == json.loads(flatpoint.rkc_batch(3, count=4, numeric=False))

    print("smoke test passed")


if __name__ == "__main__":
    main()
