"""Counterexample generators, certificates, and the classifier."""

import math

import numpy as np
import pytest

from qcext.counterexamples import (
    ConstructionError,
    characterize,
    gen_no_lip,
    gen_no_qc,
    gen_no_uc,
    gen_non_rotund,
    gen_usc_counterexample,
)
from qcext.geometry import BallProfile, Body2
from qcext.levelset import quasiconvex_check


@pytest.fixture(scope="module")
def quartet():
    return {
        "disk": Body2.ball((0.0, 0.0), 1.0, name="disk"),
        "parabola": Body2.epigraph("parabola", name="parabola"),
        "square": Body2.from_polychain([(-1, -1), (1, -1), (1, 1), (-1, 1)],
                                       name="square"),
        "hypograph": Body2.epigraph("exp_hypograph", name="hypograph"),
    }


# -- no quasiconvex extension at all (asymptotic direction) --------------------

def test_no_qc_hypograph(quartet):
    f, cert = gen_no_qc(quartet["hypograph"], k_max=12)
    trend = cert.divergence_trend()
    assert trend["increasing"]
    assert trend["min_gap"] > 1.0
    assert np.all(cert.arc_lengths > 0)
    # the witness sits beyond every later forcing half-plane
    w = cert.witnesses[0]
    margins = [float(hp.value(w[None, :])[0]) for hp in cert.forcing_halfplanes[1:]]
    assert all(m > 0 for m in margins)
    rep = quasiconvex_check(f.eval_many, quartet["hypograph"], 10_000,
                            seed=1, window=(-5, 40, -40, 1.5))
    assert rep.passed


def test_no_qc_rejects(quartet):
    with pytest.raises(ConstructionError):
        gen_no_qc(quartet["parabola"])
    with pytest.raises(ConstructionError, match="bounded"):
        gen_no_qc(quartet["disk"])


# -- no continuous extension (boundary segment) --------------------------------

def test_non_rotund_triangle():
    tri = Body2.from_polychain([(0, 1), (2, 1), (1, -3)], name="triangle")
    f, cert = gen_non_rotund(tri, k_max=16)
    assert cert.jump is not None
    assert cert.jump[1] - cert.jump[0] > 0
    assert np.all(cert.arc_lengths > 0)
    rep = quasiconvex_check(f.eval_many, tri, 10_000, seed=2)
    assert rep.passed


def test_non_rotund_square(quartet):
    _, cert = gen_non_rotund(quartet["square"], k_max=16)
    assert cert.jump[1] > cert.jump[0]
    assert np.all(cert.arc_lengths > 0)


def test_non_rotund_rejects_disk(quartet):
    with pytest.raises(ConstructionError, match="rotund"):
        gen_non_rotund(quartet["disk"])


# -- no uniformly continuous extension ------------------------------------------

def test_no_uc_parabola(quartet):
    f, cert = gen_no_uc(quartet["parabola"], k_max=24)
    assert np.allclose(cert.points[0], [1.0, 0.0], atol=1e-6)
    assert cert.bilip == pytest.approx(2.0 / math.sqrt(5.0), abs=0.02)
    assert cert.bilip >= 0.5
    gaps = np.diff(cert.levels)
    assert float(np.min(gaps)) >= cert.bilip * (1 - 1e-6)
    # the second differences along the chain collapse
    assert cert.gaps[-1] < cert.gaps[0]
    # chain chords have unit length
    steps = np.linalg.norm(np.diff(cert.points, axis=0), axis=1)
    assert np.allclose(steps, 1.0, atol=1e-6)


def test_no_uc_cosh_decays_faster(quartet):
    _, cert_p = gen_no_uc(quartet["parabola"], k_max=16)
    _, cert_c = gen_no_uc(Body2.epigraph("cosh"), k_max=16)
    assert cert_c.gaps[8] < cert_p.gaps[8]


def test_no_uc_paper_case_values(quartet):
    f, cert = gen_no_uc(quartet["parabola"], k_max=8)
    h, off = cert.h_normal, cert.h_offset
    al = cert.levels
    # value 0 below the chain start
    low = quartet["parabola"].witness.copy()
    low = np.array([0.0, -0.9])
    assert f.eval_one(low) == 0.0
    # linear ramp on [alpha_1, alpha_2)
    hv = 0.5 * (al[0] + al[1])
    p = np.array([0.0, hv + off]) if abs(h[0]) < 1e-9 else None
    assert p is not None
    want = al[0] + (al[2] - al[0]) * (hv - al[0]) / (al[1] - al[0])
    assert f.eval_one(p) == pytest.approx(want, abs=1e-9)
    # plateau on [alpha_2, alpha_3) inside the half-plane
    hv = 0.5 * (al[1] + al[2])
    p = np.array([0.0, hv + off])
    hp = cert.halfplanes[0]
    if hp.value(p[None, :])[0] <= 0:
        assert f.eval_one(p) == pytest.approx(al[2], abs=1e-9)
    # outside the half-plane the distance is added
    q = p + hp.normal * 3.0
    if abs(float(q @ h) - off - hv) < (al[2] - al[1]) * 0.49:
        d = float(hp.value(q[None, :])[0])
        assert f.eval_one(q) == pytest.approx(al[2] + max(d, 0.0), abs=1e-6)


def test_no_uc_rejects(quartet):
    with pytest.raises(ConstructionError, match="bounded"):
        gen_no_uc(quartet["disk"])
    with pytest.raises(ConstructionError, match="bounded"):
        gen_no_uc(quartet["square"])
    with pytest.raises(ConstructionError, match="asymptotic"):
        gen_no_uc(quartet["hypograph"])


# -- no Lipschitz extension -------------------------------------------------------

def test_no_lip_disk_profile_matches_closed_form(quartet):
    _, cert = gen_no_lip(quartet["disk"], k_max=20)
    # stable closed form for the circle profile
    bp = BallProfile(1.0)
    zs = cert.eps / 2.0 ** np.arange(0, 21)
    exact = bp.g(zs) / 2.0 - bp.g(zs / 2.0)
    rel = np.abs(cert.secant_gaps - exact) / exact
    assert float(np.max(rel)) < 0.01
    # small z behaviour delta(z) ~ z^2 / 8
    assert cert.secant_gaps[6] == pytest.approx(zs[6] ** 2 / 8.0, rel=0.02)


def test_no_lip_disk_trend(quartet):
    _, cert = gen_no_lip(quartet["disk"], k_max=20)
    K = cert.lip_lower_bounds
    assert np.all(np.diff(K[2:]) > 0)
    ratios = K[1:] / K[:-1]
    assert np.all((ratios[12:] >= 1.8) & (ratios[12:] <= 2.2))
    assert np.all(np.diff(cert.products) < 0)
    assert cert.products[20] < 1e-4


def test_no_lip_square_flat_profile(quartet):
    _, cert = gen_no_lip(quartet["square"], k_max=14, scan=16)
    # flat boundary: secant gaps vanish near zero, so K ~ gauge*eps/(2^{k+3} a)
    assert np.all(cert.secant_gaps[4:] <= 1e-12)
    want = cert.gauge * cert.eps / (2.0 ** (np.arange(5.0, 15.0) + 3.0)
                                    * cert.alphas[6:16])
    assert np.allclose(cert.lip_lower_bounds[5:15], want, rtol=1e-6)
    ratios = cert.lip_lower_bounds[6:] / cert.lip_lower_bounds[5:-1]
    assert np.all(np.abs(ratios - 2.0) < 1e-6)


def test_no_lip_pinch_distance(quartet):
    # d(Q_k, P_k) = 2 delta(eps/2^k) + alpha_{k+1} and it bounds the
    # distance from the next separating line to the current body
    f, cert = gen_no_lip(quartet["disk"], k_max=10)
    for k in range(6):
        d_qp = float(np.linalg.norm(cert.q_points[k] - cert.p_points[k]))
        want = 2.0 * cert.secant_gaps[k] + cert.alphas[k + 1]
        assert d_qp == pytest.approx(want, rel=1e-9)
        slope, intercept = cert.lines[k + 1]
        nvec = np.array([slope, -1.0]) / math.hypot(slope, 1.0)
        dist_line = abs(float(nvec @ cert.p_points[k]) + intercept / math.hypot(slope, 1.0))
        assert dist_line <= d_qp + 1e-12


def test_no_lip_function_is_qc(quartet):
    f, cert = gen_no_lip(quartet["disk"], k_max=10)
    rep = quasiconvex_check(f.eval_many, quartet["disk"], 10_000, seed=3)
    assert rep.passed
    # staircase values stay within the construction's range
    rng = np.random.default_rng(4)
    pts = rng.uniform(-1, 1, (500, 2))
    pts = pts[quartet["disk"].contains_many(pts)]
    vals = f.eval_many(pts)
    assert np.all(vals >= -1e-12)
    assert np.all(vals <= cert.eps / 2.0 + 1e-9)


# -- the fixed usc counterexample ---------------------------------------------------

def test_usc_values():
    f, wit = gen_usc_counterexample()
    assert f.eval_one((0.0, -1.0)) == 0.0
    assert f.eval_one((0.0, 0.0)) == 1.0
    assert f.eval_one((0.5, 0.5)) == 0.5
    assert wit.value_bottom == 0.0 and wit.value_corner == 1.0


def test_usc_strict_sublevels_convex():
    f, _ = gen_usc_counterexample()
    rng = np.random.default_rng(6)
    dom = Body2.from_polychain([(0, -1), (1, -1), (1, 1), (0, 1)])
    for alpha in (0.25, 0.5, 0.75, 1.0):
        pts = np.column_stack([rng.uniform(0, 1, 4000), rng.uniform(-1, 1, 4000)])
        inside = f.eval_many(pts) < alpha
        a = pts[inside]
        if len(a) < 2:
            continue
        idx = rng.integers(0, len(a), (2000, 2))
        mids = 0.5 * (a[idx[:, 0]] + a[idx[:, 1]])
        assert np.all(f.eval_many(mids) < alpha + 1e-12)
    del dom


# -- classifier -----------------------------------------------------------------------

def test_characterize_quartet(quartet):
    want = {"disk": "UC_EXTENDABLE", "parabola": "C_EXTENDABLE",
            "square": "QC_EXTENDABLE", "hypograph": "NOT_QC_EXTENDABLE"}
    for name, body in quartet.items():
        cls = characterize(body)
        assert cls.extendability_class == want[name], name


def test_characterize_denials(quartet):
    cls = characterize(quartet["disk"])
    assert cls.denied == {"lipschitz": "gen_no_lip"}
    cls = characterize(quartet["parabola"])
    assert cls.denied["uniformly_continuous"] == "gen_no_uc"
    cls = characterize(quartet["square"])
    assert cls.denied["continuous"] == "gen_non_rotund"
    cls = characterize(quartet["hypograph"])
    assert cls.denied["qc"] == "gen_no_qc"
    assert cls.granted == []


def test_characterize_predicates(quartet):
    cls = characterize(quartet["hypograph"])
    assert cls.predicates["has_asymptotic_direction"]
    assert cls.predicates["rotund"]  # strictly convex yet not QC-extendable
    assert not cls.predicates["bounded"]
    assert not cls.predicates["affine"] and not cls.predicates["dim_le_1"]


def test_no_lip_staircase_recovers_shelves(quartet):
    # sublevel recovery of the framed staircase: [f <= beta_k] equals the
    # k-th shelf body, and the sampled slope stays within the frame scale
    from qcext.levelset import lipschitz_estimate, sample_domain

    f, cert = gen_no_lip(quartet["disk"], k_max=8)
    stair = f.meta["staircase"]
    fam = stair.meta["family"]
    rng = np.random.default_rng(7)
    pts = sample_domain(fam.ambient, 4000, rng)
    vals = stair.eval_many(pts)
    for k in (0, 2, 4):
        inside = fam.bodies[k].contains_many(pts)
        assert np.all(vals[inside] <= cert.levels[k] + 1e-9)
        assert np.all(vals[~inside] > cert.levels[k] - 1e-9)
    slope = lipschitz_estimate(stair.eval_many, fam.ambient, 20_000, seed=8)
    assert slope <= 1.0 + 1e-3
    world_slope = lipschitz_estimate(f.eval_many, quartet["disk"], 20_000, seed=8)
    assert world_slope <= cert.gauge * (1.0 + 1e-3)


def test_generators_on_transformed_bodies():
    # constructions must not depend on axis alignment or scale
    import math

    th = 0.8
    R = np.array([[math.cos(th), -math.sin(th)], [math.sin(th), math.cos(th)]])
    tr = np.column_stack([1.3 * R, [0.4, -0.7]])
    rpar = Body2.epigraph("parabola", None, tr, name="rotated_parabola")
    assert characterize(rpar).extendability_class == "C_EXTENDABLE"
    _, cert = gen_no_uc(rpar, k_max=16)
    assert float(np.min(np.diff(cert.levels))) >= cert.bilip * (1 - 1e-6)
    assert cert.gaps[-1] < cert.gaps[0]

    tri = Body2.from_polychain([(0, 1), (2, 1), (1, -3)])
    _, c2 = gen_no_lip(tri, k_max=14, scan=24)
    assert np.all(np.diff(c2.lip_lower_bounds[2:]) > 0)

    verts = [tuple(R @ np.array(v)) for v in [(-1, -1), (1, -1), (1, 1), (-1, 1)]]
    sq = Body2.from_polychain(verts)
    _, c3 = gen_non_rotund(sq, k_max=14)
    assert np.all(c3.arc_lengths > 0) and c3.jump[1] > c3.jump[0]
