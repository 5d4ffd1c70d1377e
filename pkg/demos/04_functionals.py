# ---
# jupyter:
#   jupytext:
#     text_representation:
#       extension: .py
#       format_name: light
#       format_version: '1.5'
#   kernelspec:
#     display_name: Python 3
#     name: python3
# ---

# # Test functions, the group action and the two functionals
#
# A test function is homogeneous on (C^2)^n with a degree per variable, and
# has a line form on C^n.  One functional integrates the line form, the
# other integrates the homogeneous form against the Gaussian density.

# +
import numpy as np

from zamint import (
    GroupElement,
    IntegrationConfig,
    act,
    ell_gauss,
    ell_prime,
    fs_type,
    invariance_test,
    kernel_function,
    product,
    quadratic_form,
    radial_power,
    verify_cor1,
    verify_lemma3,
)
# -

# Build a test function of degree lambda - 2 and evaluate both forms.

lam = 2.5
f = fs_type(lam - 2, -0.7)
print(f.degrees, f.eval_line(np.array([[0.3 + 0.1j]])))

# The group acts by right translation.  Composition is a left action.

g1 = GroupElement.from_matrix([[1, 2], [0, 1]])
g2 = GroupElement.diag(1.5)
z = np.array([[0.2 - 0.4j]])
print(act(g1, act(g2, f)).eval_line(z), act(g1 @ g2, f).eval_line(z))

# The two functionals are proportional with a constant that depends only on
# lambda.

print(ell_prime(lam, f).value, ell_gauss(lam, f).value)
rep = verify_lemma3(lam, f)
print(rep.lhs.value, rep.rhs, rep.rel_error)

# The same holds for products of test functions in several variables.

cfg = IntegrationConfig(budget=10**5, seed=4)
f2 = product(radial_power([-0.5]), quadratic_form(np.eye(2), 0.7))
rep = verify_cor1((1.5, 2.7), f2, cfg)
print(rep.lhs.value, rep.rhs, rep.passed)

# With the determinant kernel the three-variable functional is estimated by MC.

nu = (1.2, 1.3, 1.4)
kf = kernel_function(nu)
print(kf.degrees)
rep = verify_cor1([d + 2 for d in kf.degrees], kf, cfg)
print(rep.lhs.value, rep.lhs.error, rep.rhs)

# Unitary elements leave the Gaussian functional unchanged.  A non-compact
# diagonal element breaks invariance of the line functional at lambda = 2.

q = quadratic_form(np.diag([0.0, 1.0]), 0)
print(invariance_test("ell_gauss", 2, q, 10).passed)
rep = invariance_test("ell_prime", 2, q, elements=[GroupElement.diag(2)])
print(rep.lhs.value, rep.passed)
