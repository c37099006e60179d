"""Random theories for the property batteries.

Everything is generated as exact rationals with small denominators, so
zero weights, zero-mass outcomes and exact factorizations occur often;
call ``Theory.to_float()`` for float-encoded copies.
"""
from __future__ import annotations

from fractions import Fraction
from itertools import product

import numpy as np

from .scenario import Scenario
from .theory import Theory

KINDS = ("generic", "factorizable", "local", "jc_nonlocal", "deterministic", "deterministic_local")


def random_distribution(rng: np.random.Generator, k: int, denom: int = 6,
                        zeros: bool = True) -> list[Fraction]:
    counts = rng.integers(0 if zeros else 1, denom + 1, size=k)
    if counts.sum() == 0:
        counts[rng.integers(k)] = 1
    total = int(counts.sum())
    return [Fraction(int(c), total) for c in counts]


def point_mass(k: int, i: int) -> list[Fraction]:
    return [Fraction(int(j == i)) for j in range(k)]


def random_scenario(rng: np.random.Generator, max_settings: int = 3,
                    max_outcomes: int = 3) -> Scenario:
    m_a, m_b = rng.integers(1, max_settings + 1, size=2)
    k_a, k_b = rng.integers(2, max_outcomes + 1, size=2)
    return Scenario(int(m_a), int(m_b), int(k_a), int(k_b), context="random")


def _theory(scenario, kernel_fn, mu) -> Theory:
    n = len(mu)
    kernel = np.empty((n, *scenario.shape), dtype=object)
    for lam in range(n):
        for a, b in product(range(scenario.settings_a), range(scenario.settings_b)):
            kernel[lam, a, b] = kernel_fn(lam, a, b)
    return Theory(scenario, [f"l{i}" for i in range(n)], np.array(mu, dtype=object), kernel)


def _outer(p, q):
    return np.array([[x * y for y in q] for x in p], dtype=object)


def random_mu(rng, n: int, zeros: bool = True) -> list[Fraction]:
    return random_distribution(rng, n, zeros=zeros)


def generic_theory(rng, s: Scenario, n_lambda: int = 2) -> Theory:
    def kern(lam, a, b):
        return np.array(random_distribution(rng, s.outcomes_a * s.outcomes_b),
                        dtype=object).reshape(s.outcomes_a, s.outcomes_b)
    return _theory(s, kern, random_mu(rng, n_lambda))


def factorizable_theory(rng, s: Scenario, n_lambda: int = 2, zeros: bool = True) -> Theory:
    pa = {(lam, a): random_distribution(rng, s.outcomes_a, zeros=zeros)
          for lam in range(n_lambda) for a in range(s.settings_a)}
    pb = {(lam, b): random_distribution(rng, s.outcomes_b, zeros=zeros)
          for lam in range(n_lambda) for b in range(s.settings_b)}
    return _theory(s, lambda lam, a, b: _outer(pa[lam, a], pb[lam, b]),
                   random_mu(rng, n_lambda, zeros=zeros))


def local_theory(rng, s: Scenario, n_lambda: int = 2) -> Theory:
    """Setting-independent marginals with a correlated (usually non-product) joint."""
    pa = {(lam, a): random_distribution(rng, s.outcomes_a)
          for lam in range(n_lambda) for a in range(s.settings_a)}
    pb = {(lam, b): random_distribution(rng, s.outcomes_b)
          for lam in range(n_lambda) for b in range(s.settings_b)}

    def kern(lam, a, b):
        p, q = pa[lam, a], pb[lam, b]
        joint = _outer(p, q)
        i, j = rng.choice(s.outcomes_a, size=2, replace=False)
        k, m = rng.choice(s.outcomes_b, size=2, replace=False)
        room = min(p[i] * q[m], p[j] * q[k])
        eps = room * Fraction(int(rng.integers(0, 4)), 3)
        joint[i, k] += eps
        joint[j, m] += eps
        joint[i, m] -= eps
        joint[j, k] -= eps
        return joint
    return _theory(s, kern, random_mu(rng, n_lambda))


def jc_nonlocal_theory(rng, s: Scenario, n_lambda: int = 2) -> Theory:
    """Product kernels whose marginals may depend on both settings."""
    def kern(lam, a, b):
        return _outer(random_distribution(rng, s.outcomes_a), random_distribution(rng, s.outcomes_b))
    return _theory(s, kern, random_mu(rng, n_lambda))


def deterministic_theory(rng, s: Scenario, n_lambda: int = 2, local: bool = False) -> Theory:
    if local:
        fa = {(lam, a): int(rng.integers(s.outcomes_a)) for lam in range(n_lambda)
              for a in range(s.settings_a)}
        fb = {(lam, b): int(rng.integers(s.outcomes_b)) for lam in range(n_lambda)
              for b in range(s.settings_b)}

        def kern(lam, a, b):
            return _outer(point_mass(s.outcomes_a, fa[lam, a]), point_mass(s.outcomes_b, fb[lam, b]))
    else:
        def kern(lam, a, b):
            return _outer(point_mass(s.outcomes_a, int(rng.integers(s.outcomes_a))),
                          point_mass(s.outcomes_b, int(rng.integers(s.outcomes_b))))
    return _theory(s, kern, random_mu(rng, n_lambda))


def random_theory(rng, s: Scenario | None = None, kind: str | None = None) -> Theory:
    s = random_scenario(rng) if s is None else s
    kind = KINDS[rng.integers(len(KINDS))] if kind is None else kind
    n_lambda = int(rng.integers(1, 4))
    if kind == "generic":
        return generic_theory(rng, s, n_lambda)
    if kind == "factorizable":
        return factorizable_theory(rng, s, n_lambda)
    if kind == "local":
        return local_theory(rng, s, n_lambda)
    if kind == "jc_nonlocal":
        return jc_nonlocal_theory(rng, s, n_lambda)
    if kind == "deterministic":
        return deterministic_theory(rng, s, n_lambda)
    if kind == "deterministic_local":
        return deterministic_theory(rng, s, n_lambda, local=True)
    raise ValueError(f"unknown kind {kind!r}")


def _predictable_pieces(rng, s: Scenario, n_lambda: int):
    """Per-lambda Bob value at (b0) and Alice distribution at (a0) such that
    Alice's outcome at a0 always fixes Bob's outcome at b0.

    Uses a random map g from Alice's outcomes to Bob's; Alice's support at
    lambda lies inside g^-1(Bob's value at lambda).
    """
    g = [int(rng.integers(s.outcomes_b)) for _ in range(s.outcomes_a)]
    image = sorted(set(g))
    bob_val, alice_dist = {}, {}
    for lam in range(n_lambda):
        beta = image[int(rng.integers(len(image)))]
        pre = [A for A in range(s.outcomes_a) if g[A] == beta]
        sub = random_distribution(rng, len(pre), zeros=False)
        dist = [Fraction(0)] * s.outcomes_a
        for A, w in zip(pre, sub):
            dist[A] = w
        bob_val[lam], alice_dist[lam] = beta, dist
    return bob_val, alice_dist


def predictable_factorizable_theory(rng, s: Scenario, n_lambda: int = 3):
    """Factorizable theory whose prediction lets Alice's outcome at ``a0``
    predict Bob's at ``b0``. Returns (theory, (a0, b0))."""
    a0, b0 = int(rng.integers(s.settings_a)), int(rng.integers(s.settings_b))
    bob_val, alice_dist = _predictable_pieces(rng, s, n_lambda)
    pa, pb = {}, {}
    for lam in range(n_lambda):
        for a in range(s.settings_a):
            pa[lam, a] = alice_dist[lam] if a == a0 else random_distribution(rng, s.outcomes_a)
        for b in range(s.settings_b):
            pb[lam, b] = point_mass(s.outcomes_b, bob_val[lam]) if b == b0 \
                else random_distribution(rng, s.outcomes_b)
    t = _theory(s, lambda lam, a, b: _outer(pa[lam, a], pb[lam, b]),
                random_mu(rng, n_lambda, zeros=False))
    return t, (a0, b0)


def jcfl_theory(rng, s: Scenario, n_lambda: int = 3):
    """Jarrett-complete, fragile-local theory with a predictable pair at (a0, b0).

    Kernels are products (so outcomes are independent given the settings and
    lambda). Each local marginal is either a setting-independent point mass /
    restricted distribution, or a full-support distribution that may vary with
    the remote setting; full support keeps it away from 0 and 1, which is what
    fragile locality allows. Returns (theory, (a0, b0)).
    """
    a0, b0 = int(rng.integers(s.settings_a)), int(rng.integers(s.settings_b))
    bob_val, alice_dist = _predictable_pieces(rng, s, n_lambda)
    alice_local, bob_local = {}, {}
    for lam in range(n_lambda):
        for a in range(s.settings_a):
            if a == a0:
                alice_local[lam, a] = alice_dist[lam]
            elif rng.random() < 0.5:
                alice_local[lam, a] = point_mass(s.outcomes_a, int(rng.integers(s.outcomes_a)))
            else:
                alice_local[lam, a] = None  # full support, may depend on b
        for b in range(s.settings_b):
            if b == b0:
                bob_local[lam, b] = point_mass(s.outcomes_b, bob_val[lam])
            elif rng.random() < 0.5:
                bob_local[lam, b] = point_mass(s.outcomes_b, int(rng.integers(s.outcomes_b)))
            else:
                bob_local[lam, b] = None

    def kern(lam, a, b):
        p = alice_local[lam, a] or random_distribution(rng, s.outcomes_a, zeros=False)
        q = bob_local[lam, b] or random_distribution(rng, s.outcomes_b, zeros=False)
        return _outer(p, q)
    t = _theory(s, kern, random_mu(rng, n_lambda, zeros=False))
    return t, (a0, b0)


def jc_not_fl_theory() -> Theory:
    """Deterministic (hence Jarrett-complete) theory whose Bob outcome copies
    Alice's setting: fragile locality fails."""
    s = Scenario(2, 2, 2, 2, context="jc-not-fl")

    def kern(lam, a, b):
        return _outer(point_mass(2, 0), point_mass(2, a))
    return _theory(s, kern, [Fraction(1)])


def nonlocal_toy_theory() -> Theory:
    """Deterministic theory in which B = a: deterministic, nonlocal."""
    return jc_not_fl_theory()


def bohm_like_theory(p) -> Theory:
    """Deterministic, nonlocal theory reproducing a signal-local phenomenon.

    Alice's outcomes are drawn independently per setting from f(A|a). Bob's
    outcome is read off one shared uniform variable u, compared against the
    conditional CDF of f(B|A,a,b); u is discretized at every breakpoint, so
    Lambda = (Alice assignment, u-interval) is finite. Bob's response depends
    on a, so L (and FL) fail while D (hence JC) holds.
    """
    s = p.scenario
    exact = p.exact
    zero, one = (Fraction(0), Fraction(1)) if exact else (0.0, 1.0)
    block = p.table
    fa = block[:, 0].sum(axis=2)  # f(A|a), b-independent by signal-locality

    def cdf(a, b, A):
        mass = block[a, b, A].sum()
        if mass == 0:
            return [one] * s.outcomes_b
        acc, out = zero, []
        for B in range(s.outcomes_b):
            acc = acc + block[a, b, A, B] / mass
            out.append(acc)
        out[-1] = one
        return out

    cdfs = {(a, b, A): cdf(a, b, A) for a in range(s.settings_a)
            for b in range(s.settings_b) for A in range(s.outcomes_a)}
    cuts = sorted({zero, one} | {c for v in cdfs.values() for c in v})
    intervals = [(lo, hi) for lo, hi in zip(cuts, cuts[1:]) if hi > lo]

    labels, mu, kernel = [], [], []
    dtype = object if exact else np.float64
    for alpha in product(range(s.outcomes_a), repeat=s.settings_a):
        w_alpha = one
        for a, A in enumerate(alpha):
            w_alpha = w_alpha * fa[a, A]
        for i, (lo, hi) in enumerate(intervals):
            k = np.zeros(s.shape, dtype=dtype)
            if exact:
                k[...] = zero
            for a, b in product(range(s.settings_a), range(s.settings_b)):
                A = alpha[a]
                B = next(j for j, c in enumerate(cdfs[a, b, A]) if hi <= c)
                k[a, b, A, B] = one
            labels.append(f"alpha={''.join(map(str, alpha))};u{i}")
            mu.append(w_alpha * (hi - lo))
            kernel.append(k)
    return Theory(s, labels, np.array(mu, dtype=dtype), np.array(kernel, dtype=dtype))
