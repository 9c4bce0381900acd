"""Seeded random LTL formulas for property tests and benchmarks."""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .ltl import (Always, And, Eventually, Formula, Next, Not, Or, Prop,
                  Until)

_OPS = ("lit", "and", "or", "next", "until", "eventually", "always")


def random_formula(rng: np.random.Generator, ap: Sequence[str],
                   depth: int = 3) -> Formula:
    """A formula of operator depth at most ``depth``; negation only on props."""
    if depth == 0:
        op = "lit"
    else:
        op = _OPS[rng.integers(len(_OPS))]
    if op == "lit":
        p = Prop(ap[rng.integers(len(ap))])
        return Not(p) if rng.random() < 0.5 else p
    if op in ("and", "or", "until"):
        l = random_formula(rng, ap, depth - 1)
        r = random_formula(rng, ap, depth - 1)
        return {"and": And, "or": Or, "until": Until}[op](l, r)
    x = random_formula(rng, ap, depth - 1)
    return {"next": Next, "eventually": Eventually, "always": Always}[op](x)


def fragment_sample(seed: int, count: int, ap: Sequence[str] = ("a", "b", "c"),
                    depth: int = 3) -> tuple[list[Formula], int]:
    """``count`` distinct formulas the automaton builder accepts.

    Returns the formulas and the number of rejected draws (outside the
    supported fragment).
    """
    from .automata import build_ldba
    from .residual import UnsupportedFragmentError

    rng = np.random.default_rng(seed)
    out: list[Formula] = []
    seen: set[Formula] = set()
    rejected = 0
    while len(out) < count:
        f = random_formula(rng, ap, depth)
        if f in seen:
            continue
        seen.add(f)
        try:
            build_ldba(f, ap)
        except UnsupportedFragmentError:
            rejected += 1
            continue
        out.append(f)
    return out, rejected
