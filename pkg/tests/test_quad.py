import math

import numpy as np
import pytest
from scipy import stats

from zamint.errors import BudgetExhaustedError, NonFiniteSampleError, NonIntegrableError
from zamint.gauss import sample_cgauss
from zamint.params import IntegrationConfig
from zamint.quad import (
    DomainSpec,
    Refinement,
    RngStream,
    cubature,
    exp_sinh,
    mc_expect,
    qmc_expect,
    refine,
    tanh_sinh,
    trapezoid_periodic,
)
from zamint.special import prop1_radial_rhs


def cg(n):
    return lambda st, m: sample_cgauss(st, (m, n))


# -- streams ----------------------------------------------------------------


def test_stream_reproducible():
    a = RngStream(7, 3).uniform(1000)
    b = RngStream(7, 3).uniform(1000)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, RngStream(7, 4).uniform(1000))
    assert not np.array_equal(a, RngStream(8, 3).uniform(1000))


@pytest.mark.parametrize("stream_id", [0, 1, 2, 1000])
def test_stream_equidistribution(stream_id):
    u = RngStream(123, stream_id).uniform(100_000)
    assert stats.kstest(u, "uniform").pvalue > 1e-3
    counts = np.histogram(u, bins=20, range=(0, 1))[0]
    assert stats.chisquare(counts).pvalue > 1e-3


def test_streams_uncorrelated():
    u = np.array([RngStream(5, k).uniform(50_000) for k in range(8)])
    c = np.corrcoef(u)
    off = c[~np.eye(8, dtype=bool)]
    # sd of a sample correlation is 1/sqrt(n) ~ 0.0045
    assert np.max(np.abs(off)) < 5 / math.sqrt(50_000)


# -- Monte Carlo ----------------------------------------------------------------


def test_mc_constant():
    e = mc_expect(lambda z: np.ones(z.shape[0]), cg(1), IntegrationConfig(budget=10_000, chunk=1000))
    assert e.value == 1 and e.error == 0 and e.count == 10_000 and e.method == "mc"


def test_mc_second_moment():
    e = mc_expect(lambda z: np.abs(z[:, 0]) ** 2, cg(1), IntegrationConfig())
    assert abs(e.value - 1) <= 3 * e.error
    assert e.count == 1_000_000


def test_mc_radial_cube():
    e = mc_expect(lambda z: np.sum(np.abs(z) ** 2, axis=1) ** 1.5, cg(2), IntegrationConfig())
    want = prop1_radial_rhs(3, 2).real
    assert abs(want - 3.3233509704478426) < 1e-12
    assert abs(e.value - want) <= 3 * e.error


def test_mc_complex_valued():
    e = mc_expect(lambda z: z[:, 0] ** 2, cg(1), IntegrationConfig(budget=200_000))
    assert abs(e.value) <= 3 * e.error


@pytest.mark.parametrize("chunk", [1000, 65536])
def test_mc_bit_identical_across_workers(chunk):
    f = lambda z: np.exp(np.abs(z[:, 0] * z[:, 1]))
    ests = [
        mc_expect(f, cg(2), IntegrationConfig(budget=300_000, seed=11, chunk=chunk, workers=w))
        for w in (1, 4, 8)
    ]
    assert all(e == ests[0] for e in ests)


def test_mc_depends_on_seed_and_chunk():
    f = lambda z: np.abs(z[:, 0])
    base = mc_expect(f, cg(1), IntegrationConfig(budget=20_000, chunk=5000))
    assert mc_expect(f, cg(1), IntegrationConfig(budget=20_000, chunk=5000, seed=1)).value != base.value
    assert mc_expect(f, cg(1), IntegrationConfig(budget=20_000, chunk=4000)).value != base.value


def test_mc_non_finite():
    with pytest.raises(NonFiniteSampleError):
        mc_expect(lambda z: np.full(z.shape[0], np.nan), cg(1), IntegrationConfig(budget=100, chunk=100))


def test_mc_calibration():
    # 200 repetitions, known mean 2 for |z|^4
    hits = 0
    for k in range(200):
        e = mc_expect(lambda z: np.abs(z[:, 0]) ** 4, cg(1), IntegrationConfig(budget=20_000, seed=k, chunk=20_000))
        hits += abs(e.value - 2) <= 3 * e.error
    assert hits >= 198


# -- QMC ----------------------------------------------------------------------


def test_qmc_examples():
    cfg = IntegrationConfig(budget=2**14, chunk=1024)
    one = qmc_expect(lambda u: np.ones(len(u)), 3, cfg)
    assert one.value == 1 and one.method == "qmc"
    xy = qmc_expect(lambda u: u[:, 0] * u[:, 1], 2, cfg)
    assert abs(xy.value - 0.25) < 1e-4 and abs(xy.value - 0.25) <= 5 * xy.error + 1e-12


def test_qmc_matches_mc_on_gaussian_moment():
    from zamint.gauss import uniform_to_cgauss

    cfg = IntegrationConfig(budget=2**16, chunk=2**12)
    q = qmc_expect(lambda u: np.abs(np.prod(uniform_to_cgauss(u)[:, :2], axis=1)) ** 2, 12, cfg)
    m = mc_expect(lambda z: np.abs(z[:, 0] * z[:, 1]) ** 2, cg(6), cfg)
    assert abs(q.value - m.value) <= 3 * math.hypot(q.error, m.error)
    assert abs(q.value - 1) <= 3 * q.error + 0.02


def test_qmc_arguments():
    cfg = IntegrationConfig(budget=1024, chunk=1024)
    with pytest.raises(ValueError):
        qmc_expect(lambda u: u[:, 0], 17, cfg)
    with pytest.raises(ValueError):
        qmc_expect(lambda u: u[:, 0], 2, cfg, n_shifts=4)


def test_qmc_worker_independent():
    f = lambda u: np.cos(u.sum(axis=1))
    a = qmc_expect(f, 4, IntegrationConfig(budget=2**13, chunk=1024, workers=1))
    b = qmc_expect(f, 4, IntegrationConfig(budget=2**13, chunk=1024, workers=4))
    assert a == b


# -- rules and cubature ------------------------------------------------------------


def test_rules_integrate_polynomials():
    r = tanh_sinh(4)
    assert abs(np.sum(r.w) - 1) < 1e-14
    assert abs(np.sum(r.w * r.x**3) - 0.25) < 1e-14
    assert np.allclose(r.lo + r.hi, 1.0, atol=1e-15)
    e = exp_sinh(5)
    assert abs(np.sum(e.w * np.exp(-e.x)) - 1) < 1e-12
    t = trapezoid_periodic(16)
    assert abs(np.sum(t.w * np.cos(t.x) ** 2) - math.pi) < 1e-13


def test_cubature_sin():
    dom = DomainSpec("box", 1, bounds=((0.0, math.pi),))
    e = cubature(lambda x: np.sin(x[:, 0]), dom, 1e-10)
    assert abs(e.value - 2) <= max(e.error, 1e-15)
    assert abs(e.value - 2) < 1e-12


def test_cubature_endpoint_singularity():
    dom = DomainSpec("box", 1, exponents=((-0.5, 0.0),))
    e = cubature(lambda x: x[:, 0] ** -0.5, dom, 1e-10)
    assert abs(e.value - 2) <= max(e.error, 1e-15)
    assert abs(e.value - 2) < 1e-9


def test_cubature_sphere_area():
    e = cubature(lambda u: np.ones(u.shape[0]), DomainSpec("sphere-product", 1), 1e-12)
    assert abs(e.value - 4 * math.pi) <= max(e.error, 1e-14)
    two = cubature(lambda u: u[:, 0, 2] ** 2 * u[:, 1, 0] ** 2, DomainSpec("sphere-product", 2), 1e-10)
    assert abs(two.value - (4 * math.pi / 3) ** 2) < 1e-9


def test_cubature_half_line():
    dom = DomainSpec("half-line-radial", exponents=((0.5, 0.0),))
    e = cubature(lambda r: 2 * r**1.5 * np.exp(-r * r), dom, 1e-12)
    assert abs(e.value - math.gamma(1.25)) < 1e-11


def test_cubature_unit_square():
    e = cubature(lambda x: x[:, 0] * x[:, 1], DomainSpec("box", 2), 1e-12)
    assert abs(e.value - 0.25) < 1e-14


def test_refinement_errors_shrink():
    hist = Refinement()
    dom_rules = lambda L: (lambda r: (np.sum(r.w * r.x**-0.7), np.sum(r.w * r.x**-0.7), len(r)))(tanh_sinh(L, (-0.7, 0)))
    refine(dom_rules, 1e-12, 10**7, history=hist)
    errs = hist.errors
    assert all(b <= a for a, b in zip(errs, errs[1:]))
    assert abs(hist.values[-1] - 1 / 0.3) < 1e-10


def test_cubature_budget_exhausted():
    dom = DomainSpec("box", 2)
    with pytest.raises(BudgetExhaustedError):
        cubature(lambda x: np.cos(200 * x[:, 0] * x[:, 1]), dom, 1e-14, max_evals=2000)


def test_cubature_flags_non_finite_nodes():
    with pytest.raises(NonIntegrableError):
        with np.errstate(divide="ignore"):
            cubature(lambda x: np.abs(x[:, 0] - x[:, 1]) ** -0.5, DomainSpec("box", 2), 1e-8)


def test_domain_spec_validation():
    with pytest.raises(ValueError):
        DomainSpec("box", 1, exponents=((-1.0, 0.0),))
    with pytest.raises(ValueError):
        DomainSpec("torus")
    with pytest.raises(ValueError):
        DomainSpec("box", 2, bounds=((0, 1),))
