from math import gcd

from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from curvex.slopes import INFINITY, Slope

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@st.composite
def slopes(draw, max_q: int = 60, allow_inf: bool = True):
    if allow_inf and draw(st.integers(0, 20)) == 0:
        return INFINITY
    q = draw(st.integers(1, max_q))
    p = draw(st.integers(-3 * max_q, 3 * max_q))
    g = gcd(p, q)
    return Slope(p // g, q // g)


@st.composite
def distinct_pair(draw, max_q: int = 60):
    a = draw(slopes(max_q))
    b = draw(slopes(max_q).filter(lambda s: s != a))
    return a, b
