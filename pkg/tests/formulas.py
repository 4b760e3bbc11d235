"""Random formulas and traces for cross-checking the monitor."""

from petrismc.bltl import (
    FALSE,
    TRUE,
    And,
    BoolVar,
    Bound,
    Compare,
    Eventually,
    Globally,
    Implies,
    Not,
    Or,
    Until,
)
from petrismc.bltl.formula import COMPARISONS
from petrismc.trace import ExecutionTrace, TimedSample

VARIABLES = ("p", "q", "x")


def random_bound(rng, max_bound=8):
    if rng.random() < 0.3:
        return Bound(rng.randint(1, max_bound), steps=True)
    return Bound(rng.choice([0.5, 1.0, 2.0, 2.5, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0]))


def random_formula(rng, depth=4, steps=True):
    """A formula whose operator nesting is at most ``depth``."""
    if depth == 0 or rng.random() < 0.25:
        c = rng.random()
        if c < 0.1:
            return TRUE if rng.random() < 0.5 else FALSE
        if c < 0.55:
            return BoolVar(rng.choice("pq"))
        return Compare("x", rng.choice(COMPARISONS), rng.randint(0, 3))
    k = rng.randrange(7)

    def sub():
        return random_formula(rng, depth - 1, steps)

    def bound():
        b = random_bound(rng)
        return b if steps or not b.steps else Bound(float(b.value))

    if k == 0:
        return Not(sub())
    if k == 1:
        return And(sub(), sub())
    if k == 2:
        return Or(sub(), sub())
    if k == 3:
        return Implies(sub(), sub())
    if k == 4:
        return Until(sub(), sub(), bound())
    if k == 5:
        return Eventually(sub(), bound())
    return Globally(sub(), bound())


def random_state(rng):
    return {"p": rng.random() < 0.5, "q": rng.random() < 0.5, "x": rng.randint(0, 3)}


def random_trace(rng, length, unit_steps=True, start=0.0):
    t = start
    samples = []
    for _ in range(length):
        samples.append(TimedSample(random_state(rng), t))
        t += 1.0 if unit_steps else rng.choice([0.0, 0.5, 1.0, 1.0, 2.0])
    return ExecutionTrace(VARIABLES, tuple(samples))
