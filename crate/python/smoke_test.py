"""Smoke test for the pbgfluor extension.

Build and install first:
    pip install maturin
    maturin develop -m crates/python/Cargo.toml --release
"""

import math

import pbgfluor


def main():
    free = pbgfluor.Params.free_space(gamma=1.0, rabi=20.0)
    sz, sm = pbgfluor.steady_state(free)
    assert abs(sz + 1.0 / (1.0 + 2.0 * 400.0)) < 1e-12, sz
    assert isinstance(sm, complex)

    mollow = pbgfluor.spectrum(free)
    heights = [p[1] for p in mollow["peaks"]]
    assert len(heights) == 3, heights
    assert abs(heights[1] / heights[0] - 3.0) < 0.1, heights
    g1 = (1.0 + sz) / 2.0
    assert abs(mollow["total_power"] - 4.0 * math.pi**2 * g1) < 1e-5 * mollow["total_power"]

    band = pbgfluor.Params.band_edge(beta=1.0, omega_c=100.0, omega_a=100.27, rabi=0.25)
    assert band.unit == "beta"
    s = pbgfluor.spectrum(band)
    assert abs(s["omega"][0] + 0.27) < 1e-12
    assert min(s["s_inc"]) >= 0.0
    lower, _, upper = s["peaks"]
    assert upper[1] > lower[1]

    rows = pbgfluor.kernel(band, [-1.0, 0.0, 1.0])
    omega, g, gc, n = rows[0]
    assert g.real == 0.0 and n == 0.0

    scan = pbgfluor.scan(band, [10.0, 0.05, -0.5])
    assert [r[2] for r in scan] == [3, 2, None], scan

    try:
        pbgfluor.Params.free_space(gamma=-1.0, rabi=1.0)
    except ValueError:
        pass
    else:
        raise AssertionError("negative gamma accepted")

    print("pbgfluor", pbgfluor.__version__, "smoke test passed")


if __name__ == "__main__":
    main()
