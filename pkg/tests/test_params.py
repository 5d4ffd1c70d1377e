import cmath

import pytest
from hypothesis import given, strategies as st

from zamint.params import (
    DomainStatus,
    Estimate,
    IntegrationConfig,
    ParameterPoint,
    check_domain,
    nu_from_sigma,
    sigma_from_nu,
)

finite = st.floats(-50, 50, allow_nan=False)
cplx = st.builds(complex, finite, finite)
triples = st.tuples(cplx, cplx, cplx)


@pytest.mark.parametrize(
    "sigma, nu",
    [((1, 1, 1), (1, 1, 1)), ((1, 1, 2), (2, 2, 0)), ((0.75, 0.75, 0.75), (0.75, 0.75, 0.75))],
)
def test_nu_from_sigma_examples(sigma, nu):
    assert nu_from_sigma(sigma) == tuple(complex(v) for v in nu)


def test_sigma_from_nu_examples():
    assert sigma_from_nu((1, 1, 1)) == (1, 1, 1)
    assert sigma_from_nu((2, 2, 0)) == (1, 1, 2)


@given(triples)
def test_round_trip(s):
    back = sigma_from_nu(nu_from_sigma(s))
    scale = max(1.0, max(abs(v) for v in s))
    assert max(abs(a - b) for a, b in zip(back, s)) <= 8e-16 * 4 * scale
    nu = nu_from_sigma(s)
    assert abs(sum(nu) - sum(s)) <= 1e-14 * scale


@given(triples)
def test_parameter_point_invariants(s):
    p = ParameterPoint.from_sigma(s)
    for i in range(3):
        assert p.nu[i] == p.sigma[(i + 1) % 3] + p.sigma[(i + 2) % 3] - p.sigma[i]


def test_inconsistent_point_rejected():
    with pytest.raises(ValueError):
        ParameterPoint((1, 1, 1), (1, 1, 2))
    with pytest.raises(ValueError):
        nu_from_sigma((1, 2))


@pytest.mark.parametrize(
    "sigma, status",
    [
        ((1.25, 1.25, 1.25), DomainStatus.OK),
        ((1, 1, 1), DomainStatus.MC_VARIANCE_WARNING),
        ((0.75, 0.75, 0.75), DomainStatus.MC_VARIANCE_WARNING),
        ((1, 1, 2), DomainStatus.DIVERGENT),
        ((0.4, 1, 1), DomainStatus.DIVERGENT),
    ],
)
def test_check_domain(sigma, status):
    chk = check_domain(ParameterPoint.from_sigma(sigma))
    assert chk.status is status
    assert chk.converges == (status is not DomainStatus.DIVERGENT)


def test_convergence_matches_stated_region():
    # ok/warning iff Re sigma_i > 1/2 and Re nu_i > 0
    assert check_domain(ParameterPoint.from_sigma((1, 1, 1))).converges
    assert "nu_3" in check_domain(ParameterPoint.from_sigma((1, 1, 2))).reason
    assert "sigma_1" in check_domain(ParameterPoint.from_sigma((0.4, 1, 1))).reason
    assert not check_domain(ParameterPoint.from_sigma((0.5, 1, 1))).converges


@given(triples, st.permutations([0, 1, 2]))
def test_check_domain_permutation_invariant(s, perm):
    p = ParameterPoint.from_sigma(s)
    assert check_domain(p).status is check_domain(p.permuted(perm)).status


@given(triples, st.permutations([0, 1, 2]))
def test_permuted_point_is_consistent(s, perm):
    q = ParameterPoint.from_sigma(s).permuted(perm)
    assert max(abs(a - b) for a, b in zip(nu_from_sigma(q.sigma), q.nu)) < 1e-12 * max(1, *map(abs, s))


def test_estimate_invariants():
    assert Estimate.closed_form(2).error == 0
    with pytest.raises(ValueError):
        Estimate(1, -1, 1, "mc")
    with pytest.raises(ValueError):
        Estimate(1, 0, 0, "mc")
    with pytest.raises(ValueError):
        Estimate(1, 0.1, 1, "closed-form")
    with pytest.raises(ValueError):
        Estimate(1, 0, 1, "guess")
    e = Estimate(cmath.exp(1j), 0.1, 10, "mc")
    assert e.stochastic and abs(e.relative_error - 0.1) < 1e-15


def test_integration_config_invariants():
    IntegrationConfig(budget=10, chunk=10)
    with pytest.raises(ValueError):
        IntegrationConfig(budget=10, chunk=11)
    with pytest.raises(ValueError):
        IntegrationConfig(chunk=0, budget=10)
    with pytest.raises(ValueError):
        IntegrationConfig(workers=0)
    with pytest.raises(ValueError):
        IntegrationConfig(seed=-1)
    assert IntegrationConfig().with_budget(100).chunk == 100
