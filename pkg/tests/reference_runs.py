"""Cached pipeline runs shared by the pipeline and acceptance tests."""

from functools import lru_cache

from sensireach.pipeline import run_algorithm1, run_ia_only
from sensireach.problems import builtin_problems, unicycle_problem


@lru_cache(maxsize=None)
def problems():
    return builtin_problems()


@lru_cache(maxsize=None)
def unicycle():
    return unicycle_problem()


@lru_cache(maxsize=None)
def unicycle_alg1(a, dispersion="per_dim"):
    return run_algorithm1(unicycle(), a, dispersion=dispersion)


@lru_cache(maxsize=None)
def unicycle_ia():
    return run_ia_only(unicycle())


@lru_cache(maxsize=None)
def alg1(name, a):
    return run_algorithm1(problems()[name], a)
