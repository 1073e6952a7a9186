"""Smoke test for the qec extension module.

Build and install first:
    pip install --no-build-isolation ./crates/python
or
    maturin develop -m crates/python/Cargo.toml
"""

import json
import math

import qec


def close(a, b, tol=1e-8):
    return all(abs(x - y) <= tol for x, y in zip(a, b)) and len(a) == len(b)


def main():
    s = 1 / math.sqrt(2)
    ghz = qec.PureState([2, 2, 2], [s] + [0] * 6 + [s])
    assert close(ghz.entropy_vector(), [1, 1, 1, 1, 1, 1, 0])
    assert qec.subset_labels(3) == ["A", "B", "C", "AB", "AC", "BC", "ABC"]
    assert abs(ghz.mutual_information(0, 1) - 1) < 1e-12

    state, claimed, verified = qec.v_state(4)
    assert close(claimed, verified)
    abc = state.marginal([0, 1, 2])
    assert close(qec.to_paper_order(abc.entropy_vector()), [2, 2, 2, 4, 4, 4, 2])

    rho = qec.random_density([2, 2], 3, 5)
    psi = rho.purify()
    assert abs(psi.subsystem_entropy([0, 1]) - rho.entropy()) < 1e-9
    again = qec.PureState.from_json(psi.to_json())
    assert again.amplitudes == psi.amplitudes

    report = json.loads(qec.cone_check(qec.from_paper_order([0.3, 0.3, 0.3, 0.6, 0.6, 0.6, 0.3])))
    assert report["cone"]["inside"]
    assert "refined" in report["tip"]["exclusion_advisories"]
    assert abs(qec.binary_entropy(0.125) - 0.543564443199596) < 1e-12

    lemmas = json.loads(qec.verify_lemmas(qec.w_state(4)[0]))
    assert lemmas["theorem"]["entropy_sum"] > 1

    print("python smoke test passed")


if __name__ == "__main__":
    main()
