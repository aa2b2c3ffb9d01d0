import math

import hypothesis
import hypothesis.strategies as st

from qlink import QuadState

hypothesis.settings.register_profile("ci", max_examples=100, deadline=None)
hypothesis.settings.load_profile("ci")


@st.composite
def quad_states(draw):
    """Valid states: arbitrary signal powers over a squeezed thermal floor."""
    sig_i = draw(st.floats(0.0, 1e3))
    sig_q = draw(st.floats(0.0, 1e3))
    squeeze = draw(st.floats(-2.0, 2.0))
    thermal = draw(st.floats(0.0, 10.0))
    noise_i = (0.5 + thermal) * math.exp(-2.0 * squeeze)
    noise_q = (0.5 + thermal) * math.exp(2.0 * squeeze)
    return QuadState(sig_i, sig_q, noise_i, noise_q)


transmissions = st.floats(1e-6, 1.0)
gains = st.floats(1.0, 1e3)
