from fractions import Fraction

from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from starflux.formal import FormalScalar, GaussQ
from starflux.torus import TorusFun

settings.register_profile(
    "exact", deadline=None, max_examples=40, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("exact")

small_rationals = st.fractions(min_value=-4, max_value=4, max_denominator=4)


@st.composite
def gaussq(draw):
    return GaussQ(draw(small_rationals), draw(small_rationals))


@st.composite
def series(draw, K=3, constant=None):
    coeffs = [draw(gaussq()) for _ in range(K + 1)]
    if constant is not None:
        coeffs[0] = GaussQ(constant)
    return FormalScalar(coeffs, K)


@st.composite
def torus_funs(draw, K=3, bound=2, max_modes=3, classical=True):
    """Small Fourier polynomials; ``classical`` keeps only nu^0 coefficients."""
    n = draw(st.integers(0, max_modes))
    modes = {}
    for _ in range(n):
        m = (draw(st.integers(-bound, bound)), draw(st.integers(-bound, bound)))
        c = draw(gaussq())
        modes[m] = FormalScalar([c], K) if classical else draw(series(K))
    return TorusFun(modes, 2, K)


def frac(a, b=1):
    return Fraction(a, b)
