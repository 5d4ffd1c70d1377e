import math
import warnings

import numpy as np
import pytest

from zamint.errors import CoincidenceError, DomainError, VarianceWarning
from zamint.params import IntegrationConfig, ParameterPoint
from zamint.quad import RngStream
from zamint.special import rhs_eq3
from zamint.zam import (
    SpherePoint,
    chordal_deviation,
    chordal_gate,
    default_route,
    fs_sample,
    integrand_eq1,
    integrate_eq1_cubature,
    integrate_eq1_mc,
    plane_to_sphere,
    sphere_to_plane,
    verify_chain,
    verify_thm1,
)

PI3 = math.pi**3
CFG = IntegrationConfig(budget=400_000, chunk=50_000)


def P(*s):
    return ParameterPoint.from_sigma(s)


def rel(a, b):
    return abs(a - b) / abs(b)


# -- sphere chart ----------------------------------------------------------------


def test_stereographic_round_trip():
    z = fs_sample(RngStream(0, 0), 1000)
    u = plane_to_sphere(z)
    assert np.allclose(np.linalg.norm(u, axis=-1), 1, atol=1e-14)
    assert np.allclose(sphere_to_plane(u), z, rtol=1e-12)
    sp = SpherePoint.from_plane(0.3 - 2j)
    assert abs(math.sqrt(sp.x**2 + sp.y**2 + sp.z**2) - 1) < 1e-12
    assert abs(sp.to_plane() - (0.3 - 2j)) < 1e-12
    with pytest.raises(ValueError):
        SpherePoint(1.0, 1.0, 0.0)


def test_chordal_gate():
    assert chordal_gate(10_000, 0) <= 1e-12
    assert chordal_gate(10_000, 1) <= 1e-12
    assert chordal_deviation(1 + 1j, -2).max() <= 1e-15


# -- integrand and sampler ---------------------------------------------------------


def test_integrand_examples():
    assert abs(integrand_eq1(P(1, 1, 1), 0, 1, -1) - 1 / 16) < 1e-16
    z = fs_sample(RngStream(1, 0), (20, 3))
    got = integrand_eq1(P(1, 1, 1), z[:, 0], z[:, 1], z[:, 2])
    assert np.allclose(got, np.prod((1 + np.abs(z) ** 2) ** -2.0, axis=1), rtol=1e-13)


def test_integrand_permutation_symmetry():
    p = P(0.9 + 0.2j, 1.3, 0.8)
    z = fs_sample(RngStream(2, 0), (20, 3))
    base = integrand_eq1(p, z[:, 0], z[:, 1], z[:, 2])
    for perm in ((1, 2, 0), (2, 0, 1), (1, 0, 2), (0, 2, 1)):
        q = p.permuted(perm)
        zz = z[:, list(perm)]
        assert np.allclose(integrand_eq1(q, zz[:, 0], zz[:, 1], zz[:, 2]), base, rtol=1e-12)


def test_integrand_coincidence():
    with pytest.raises(CoincidenceError):
        integrand_eq1(P(1.2, 1.2, 1.5), 0.5, 0.5, 1)


def test_fs_sample_distribution():
    z = fs_sample(RngStream(3, 0), 1_000_000)
    inside = (np.abs(z) <= 1).astype(float)
    assert abs(inside.mean() - 0.5) <= 3 * inside.std() / 1000
    w = 1 / (1 + np.abs(z) ** 2)
    assert abs(w.mean() - 0.5) <= 3 * w.std() / 1000
    assert abs(z.real.mean()) < 0.05 and abs(z.imag.mean()) < 0.05


# -- Monte Carlo route ----------------------------------------------------------------


def test_mc_examples():
    with pytest.warns(VarianceWarning):
        e = integrate_eq1_mc(P(1, 1, 1), CFG)
    assert rel(e.value, PI3) < 1e-14 and e.count == CFG.budget
    p = P(1.25, 1.25, 1.25)
    e = integrate_eq1_mc(p, CFG)
    assert abs(e.value - rhs_eq3(p)) <= 3 * e.error
    with pytest.raises(DomainError):
        integrate_eq1_mc(P(1, 1, 2), CFG)


def test_mc_variance_warning():
    with pytest.warns(VarianceWarning):
        integrate_eq1_mc(P(1, 1.1, 1.2), IntegrationConfig(budget=1000, chunk=1000))
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        integrate_eq1_mc(P(1.25, 1.3, 1.2), IntegrationConfig(budget=1000, chunk=1000))


# -- cubature route ---------------------------------------------------------------------


@pytest.mark.parametrize(
    "sigma, tol",
    [
        ((1, 1, 1), 1e-6),
        ((0.75, 0.75, 0.75), 1e-6),
        ((0.9, 1.0, 1.1), 1e-6),
        ((1 + 0.3j, 0.9, 1.1), 1e-6),
        ((0.7, 0.7, 1.2), 1e-6),  # nu_3 = 0.2
        ((0.55, 0.8, 0.7), 1e-6),
        ((2, 2, 2.5), 1e-6),
    ],
)
def test_cubature_matches_closed_form(sigma, tol):
    p = P(*sigma)
    e = integrate_eq1_cubature(p)
    assert rel(e.value, rhs_eq3(p)) <= tol
    assert abs(e.value - rhs_eq3(p)) <= max(e.error, 1e-12 * abs(e.value))


def test_cubature_frozen_values():
    assert rel(integrate_eq1_cubature(P(1, 1, 1)).value, 31.0062766802998202) < 1e-12
    assert rel(integrate_eq1_cubature(P(0.75, 0.75, 0.75)).value, 74.2997352400222905) < 1e-10


def test_cubature_permutation_symmetry():
    p = P(0.8 + 0.1j, 1.2, 0.95)
    base = integrate_eq1_cubature(p).value
    for perm in ((1, 2, 0), (2, 0, 1), (1, 0, 2)):
        assert rel(integrate_eq1_cubature(p.permuted(perm)).value, base) < 1e-9


def test_cubature_worker_independent():
    p = P(0.8, 1.2, 0.95)
    a = integrate_eq1_cubature(p, IntegrationConfig(workers=1))
    b = integrate_eq1_cubature(p, IntegrationConfig(workers=4))
    assert a == b


def test_cubature_domain():
    with pytest.raises(DomainError):
        integrate_eq1_cubature(P(0.4, 1, 1))


# -- verification ------------------------------------------------------------------------


def test_default_route():
    assert default_route(P(1.25, 1.25, 1.25)) == "mc"
    assert default_route(P(1, 1, 1)) == "cubature"
    assert default_route(P(0.75, 0.75, 0.75)) == "cubature"


def test_verify_thm1_examples():
    r = verify_thm1(P(1, 1, 1), CFG, route="both")
    assert r.passed and rel(r.rhs, PI3) < 1e-15
    assert r.extra["mc"].method == "mc" and r.extra["cubature"].method == "cubature"
    assert verify_thm1(P(0.9, 1.0, 1.1), CFG).passed
    r = verify_thm1(P(1 + 0.3j, 0.9, 1.1), CFG)
    assert r.passed and abs(r.rhs.imag) > 1
    with pytest.raises(DomainError):
        verify_thm1(P(1, 1, 2), CFG)
    with pytest.raises(ValueError):
        verify_thm1(P(1, 1, 1), CFG, route="magic")


def test_route_agreement():
    r = verify_thm1(P(1.25, 1.0, 1.1), CFG, route="both")
    assert r.extra["agreement_sigmas"] <= 3
    assert r.warnings  # sigma_2 = 1 sits on the conservative variance flag


def test_derivation_chain():
    r = verify_chain(P(1.25, 1.3, 1.2), CFG)
    assert r.passed
    assert r.extra["gauss"].method == "mc"
