import random

import pytest
from hypothesis import HealthCheck, settings

from fibzeta.pencil import SOFT_VIOLATIONS, SurfaceInput, assumption_gate, connection_matrix

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

# g = 1, h = 3 surfaces whose only gate violations are the soft ones
SURFACE_P7 = {(3, 0): 1, (0, 3): 1, (0, 0): 1, (0, 1): -2, (1, 1): 3, (2, 0): 1}
SURFACE_P5 = {(3, 0): 1, (0, 3): 1, (0, 0): 1, (0, 2): -1, (1, 0): -2, (1, 1): -1, (2, 0): 1}
SURFACE_P11 = {(3, 0): 1, (0, 3): 1, (0, 0): 1, (1, 0): -3}
# g = 1, p = 7 family for the scaling check
SURFACE_H5 = {(3, 0): 1, (0, 5): 1, (0, 0): 1, (0, 1): -3, (0, 2): 1, (1, 0): 2, (1, 1): -1}
SURFACE_H9 = {(3, 0): 1, (0, 9): 1, (0, 0): 1, (0, 1): 3, (0, 2): -2, (0, 5): -3, (0, 6): 1,
              (0, 8): 2, (1, 0): 3, (1, 1): 2, (1, 2): -3}
EX_P17 = {(3, 0): 1, (1, 4): 4, (1, 3): 5, (0, 13): 1, (0, 12): 6, (0, 10): 5, (0, 9): 8,
          (0, 8): 8, (0, 5): 5, (0, 4): 1, (0, 3): 5, (0, 2): 1, (0, 0): 1}
EX_P5 = {(3, 0): 1, (1, 13): 1, (1, 3): 3, (1, 0): 1, (0, 31): 1, (0, 15): 2, (0, 8): 4,
         (0, 3): 3, (0, 1): 2, (0, 0): 1}
EX_P11 = {(5, 0): 1, (3, 0): 4, (1, 2): 4, (1, 1): 4, (1, 0): 8, (0, 7): 1, (0, 6): 5, (0, 0): 1}


def random_surface(g, h, rng, coef=3):
    """Random ``Q`` in the simplex shape, with X-monomials of weight at most ``2h``."""
    d = 2 * g + 1
    Q = {(d, 0): 1, (0, h): 1, (0, 0): 1}
    for a in range(d):
        for b in range(h + 1):
            if (a, b) in Q:
                continue
            w = a * h + b * d
            lim = h * d if a == 0 else 2 * h
            if w <= lim and rng.random() < 0.6:
                Q[(a, b)] = rng.randint(-coef, coef)
    return {k: v for k, v in Q.items() if v}


def gate_passing_surfaces(g, h, p, count, seed, relaxed=True, max_tries=400):
    rng = random.Random(seed)
    out = []
    for _ in range(max_tries):
        Q = random_surface(g, h, rng)
        s = SurfaceInput(p, Q)
        try:
            conn = connection_matrix(s)
        except Exception:
            continue
        viol = {v.violation for v in assumption_gate(s, conn)}
        if viol <= (SOFT_VIOLATIONS if relaxed else set()):
            out.append(Q)
            if len(out) == count:
                break
    return out


@pytest.fixture(scope="session")
def conn_p7():
    return connection_matrix(SurfaceInput(7, SURFACE_P7))
