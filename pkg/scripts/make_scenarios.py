"""Write the example scenarios under scenarios/."""
import json
from pathlib import Path

import numpy as np

from buresalg.constructions import flip_instance, jump_instance
from buresalg.scenario import encode_element

OUT = Path(__file__).resolve().parent.parent / "scenarios"


def diag(*values):
    return {"diagonal": list(values)}


def write(name, data):
    (OUT / name).write_text(json.dumps(data, indent=2) + "\n")


def main():
    OUT.mkdir(exist_ok=True)
    h = np.array([[2.0, 1.0], [1.0, 2.0]])
    write("qubit_pass.json", {
        "name": "qubit_pass",
        "seed": 7,
        "algebra": {"blocks": [2]},
        "forms": {
            "nu": diag(0.5, 0.5),
            "rho": diag(0.75, 0.25),
            "up": diag(1.0, 0.0),
            "down": diag(0.0, 1.0),
        },
        "elements": {
            "a": diag(2.0, 0.5),
            "h": {"blocks": [[[[v, 0.0] for v in row] for row in h]]},
            "b": {"blocks": [[[[v, 0.0] for v in row] for row in np.diag([0.5, 2.0]) @ h]]},
            "z": diag(1.0, -1.0),
            "x1": diag(1.0, 0.0),
        },
        "analyses": [
            {"op": "fidelity", "nu": "nu", "rho": "rho",
             "expect": {"sqrt_p": float(np.sqrt(0.375) + np.sqrt(0.125))}},
            {"op": "min_set", "nu": "up", "rho": "down",
             "expect": {"status": "Empty", "reason": "orthogonal forms"}},
            {"op": "min_set", "nu": "nu", "rho": "rho", "expect": {"status": "NonEmpty", "unique": True}},
            {"op": "uhlmann", "mu": "nu", "a": "a", "b": "b"},
            {"op": "bounds", "nu": "nu", "rho": "rho", "a": "a", "f_value": 0.9},
            {"op": "tau", "nu": "nu", "rho": "rho", "z": "z"},
            {"op": "least_algebra", "nu": "nu", "rho": "rho", "expect": {"decision": "Exists"}},
            {"op": "r0", "x": "x1", "expect": {"label": "one nonzero eigenvalue"}},
            {"op": "radon_nikodym", "nu": "nu", "rho": "rho"},
        ],
    })
    write("qubit_constructed_failure.json", {
        "name": "qubit_constructed_failure",
        "seed": 7,
        "algebra": {"blocks": [2]},
        "forms": {"nu": diag(0.5, 0.5), "rho": diag(0.75, 0.25),
                  "up": diag(1.0, 0.0), "down": diag(0.0, 1.0)},
        "analyses": [
            {"op": "fidelity", "nu": "nu", "rho": "rho", "expect": {"sqrt_p": 1.0}},
            {"op": "min_set", "nu": "up", "rho": "down", "expect": {"status": "NonEmpty"}},
            {"op": "radon_nikodym", "nu": "up", "rho": "down"},
        ],
    })
    write("malformed_density.json", {
        "name": "malformed_density",
        "algebra": {"blocks": [2]},
        "forms": {"nu": diag(0.5, 0.5), "bad": diag(1.2, -0.2)},
        "analyses": [{"op": "fidelity", "nu": "nu", "rho": "bad"}],
    })
    (OUT / "malformed_syntax.json").write_text('{"algebra": {"blocks": [2]},\n "analyses": [\n')

    inst = flip_instance(8)
    k = inst.probes.ks[0]
    perm = list(inst.probes.automorphisms[0].permutation)
    write("flip_obstruction.json", {
        "name": "flip_obstruction",
        "algebra": {"blocks": [1] * 16},
        "forms": {"nu": encode_element(inst.nu.density), "rho": encode_element(inst.rho.density)},
        "elements": {"k": encode_element(k)},
        "analyses": [{"op": "least_algebra", "nu": "nu", "rho": "rho",
                      "probes": {"ks": ["k"], "automorphisms": [{"permutation": perm}]},
                      "expect": {"decision": "NotExists", "reason": "automorphism obstruction"}}],
    })
    inst = jump_instance(16, 1.7)
    write("jump_exists.json", {
        "name": "jump_exists",
        "algebra": {"blocks": [1] * 17},
        "forms": {"nu": encode_element(inst.nu.density), "rho": encode_element(inst.rho.density)},
        "analyses": [
            {"op": "least_algebra", "nu": "nu", "rho": "rho",
             "expect": {"decision": "Exists", "lambda0": 1.7}},
            {"op": "compression", "nu": "nu", "rho": "rho"},
        ],
    })


if __name__ == "__main__":
    main()
