import math

import numpy as np
import pytest

from spectra_census import group as gr
from spectra_census import regions as rg
from spectra_census import reps as rp

LETTER_ORDER = (1, -1, 2, -2, 3, -3)


def random_reduced_word(rng, k: int, n: int) -> gr.Word:
    letters = []
    for _ in range(n):
        while True:
            l = int(rng.integers(1, k + 1)) * (1 if rng.integers(2) else -1)
            if not letters or l != -letters[-1]:
                letters.append(l)
                break
    return gr.Word(tuple(letters))


def free_reduce(letters):
    """Independent stack-based free reduction used as a test oracle."""
    out = []
    for l in letters:
        if out and out[-1] == -l:
            out.pop()
        else:
            out.append(l)
    return tuple(out)


def brute_force_classes(k: int, max_core: int):
    """Necklace set via exhaustive reduction of all reduced words."""
    classes = set()
    for w in gr.enumerate_reduced_words(k, max_core):
        core, _ = gr.cyclic_reduce(w)
        if core.length <= max_core:
            classes.add(gr.canonical_rep(core))
    return classes


def naive_jordan_census(rep, member, t_grid, L_max, primitive_only=False):
    """Single-threaded scalar recount: member(x, T) -> bool."""
    vecs = []
    for c in gr.enumerate_conjugacy_classes(rep.k, L_max):
        if primitive_only and not c.primitive:
            continue
        vecs.append(np.array(rp.lambda_vector(rep, c).coords))
    return [sum(1 for x in vecs if member(x, T)) for T in t_grid]


def naive_cartan_census(rep, member, t_grid, L_max):
    vecs = []
    for w in gr.enumerate_reduced_words(rep.k, L_max):
        vecs.append(np.array(rp.mu_vector(rep, w).coords))
    return [sum(1 for x in vecs if member(x, T)) for T in t_grid]


@pytest.fixture(scope="session")
def real_pair():
    return rp.schottky_pair(3.0, 3.0)


@pytest.fixture(scope="session")
def complex_pair():
    return rp.schottky_pair(3.0, 3.0, "complex", twist=0.9)


@pytest.fixture(scope="session")
def two_factor_rep(real_pair):
    return rp.join(real_pair, rp.schottky_pair(5.0, 3.0))
