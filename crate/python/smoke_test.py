"""Smoke test for the splitquat Python extension."""

import json

import splitquat as sq


def main() -> None:
    f = sq.coeff("hol", -2, 2, 2)
    assert str(f) == "1*z11^-2", str(f)
    assert sq.LaurentElement.from_json(f.to_json()) == f
    assert f.box_op().is_zero()
    assert f.inv_transform().inv_transform() == f
    assert abs(f.evaluate([2, 0, 0, 1]) - 0.25) < 1e-15

    d = sq.dual("hol", -3, 3, 3, 1)
    g = sq.coeff("hol", -3, 3, 3, 1)
    assert sq.pair_exact(g, d) == "1/2"
    v = sq.pair_numeric(g, d, n_t=60, n_ang=16)
    assert abs(v - 0.5) < 1e-6, v

    assert sq.project(sq.coeff("hol", -3, 3, 3, 0), "dmm") == sq.coeff("hol", -3, 3, 3, 0)
    assert sq.project(sq.coeff("hol", -3, 3, 3, 0), "dh-less").is_zero()

    eig, label = sq.eigen_split([2, 0, 0, 0.5])
    assert label == "gamma-" and eig == (2, 0.5), (eig, label)
    k = sq.kernel_closed_form("dh-less", 3, 0.5, 1)
    assert abs(k - 0.6) < 1e-12, k
    s = sq.kernel_series("dh-less", [1, 0, 0, 1], [3, 0, 0, 0.5])
    assert abs(s - 0.6) < 1e-6, s
    printed = sq.kernel_closed_form("dh-greater", 2, 1 / 3, 1, printed=True)
    series = sq.kernel_series("dh-greater", [1, 0, 0, 1], [2, 0, 0, 1 / 3])
    assert abs(printed + series) < 1e-6, (printed, series)

    report = json.loads(sq.verify_structure(seed=1))
    assert report["schema"] == 1 and report["pass"], report["summary"]
    report = json.loads(sq.verify_kernels(cases=["dmm"], samples=1))
    assert report["pass"], report["summary"]
    try:
        sq.coeff("nope", -2, 2, 2)
    except ValueError:
        pass
    else:
        raise AssertionError("bad series accepted")
    print("smoke test passed")


if __name__ == "__main__":
    main()
