"""The closed-form chain rules are proofs; check them against direct iteration."""

import random

from hypothesis import given, settings, strategies as st

from nilops.constructions import random_finite_module
from nilops.gf2 import Subspace
from nilops.modules import Free, RPInfinity, Tensor


def _iterates_injective(m, k, d, vectors, steps=4, cap=600):
    cols = list(Subspace.span(vectors).basis)
    r = len(cols)
    for _ in range(steps):
        cols = [m.act_vector(d - k, d, w, True) for w in cols]
        d = 2 * d - k
        if d > cap:
            break
        if Subspace.span(cols).dim < r:
            return False
    return True


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32))
def test_tensor_rules_sound(seed):
    rng = random.Random(seed)
    k_mod = random_finite_module(rng, top=3, max_dim=2)
    f = lambda: Free(1, 1 << 12)  # noqa: E731
    shapes = [Tensor(k_mod, f()), Tensor(Tensor(k_mod, f()), f()), Tensor(f(), Tensor(k_mod, f()))]
    for m in shapes:
        for d in range(1, 9):
            n = m.dim(d)
            if not n:
                continue
            for k in range(d):
                vecs = [rng.getrandbits(n) or 1 for _ in range(rng.randint(1, min(n, 3)))]
                if m.chain_injective(k, d, vecs):
                    assert _iterates_injective(m, k, d, vecs), (m.name, k, d, vecs)


def test_rp_rule_sound():
    rp = RPInfinity()
    for d in range(1, 40):
        for k in range(d + 1):
            if rp.chain_injective(k, d, [1]):
                assert _iterates_injective(rp, k, d, [1], steps=5, cap=10**6)
