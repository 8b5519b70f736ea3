"""Shared fixtures and randomized-instance generators for the suite.

Set TORIFOL_SEED to reproduce a particular randomized run.
"""

import functools
import math
import os
import random

import pytest

from torifol import Fan, GaussianSubspace, ToricFoliatedPair, validate_fan
from torifol.gaussian import GaussRat, I, matrix_rank, primitive_vector

SEED = int(os.environ.get("TORIFOL_SEED", "20260810"))


@pytest.fixture
def rng():
    return random.Random(SEED)


# -- standard fans ----------------------------------------------------------

@functools.lru_cache(maxsize=None)
def p2_fan():
    return validate_fan(2, [(1, 0), (0, 1), (-1, -1)], [(0, 1), (1, 2), (0, 2)])[0]


@functools.lru_cache(maxsize=None)
def f1_fan():
    return validate_fan(
        2, [(1, 0), (0, 1), (-1, 1), (0, -1)], [(0, 1), (1, 2), (2, 3), (0, 3)]
    )[0]


@functools.lru_cache(maxsize=None)
def quadrant_fan():
    return validate_fan(2, [(1, 0), (0, 1)], [(0, 1)])[0]


@functools.lru_cache(maxsize=None)
def octant_fan():
    return validate_fan(3, [(1, 0, 0), (0, 1, 0), (0, 0, 1)], [(0, 1, 2)])[0]


@functools.lru_cache(maxsize=None)
def octahedron_fan():
    rays = [(1, 0, 0), (-1, 0, 0), (0, 1, 0), (0, -1, 0), (0, 0, 1), (0, 0, -1)]
    cones = [(a, b, c) for a in (0, 1) for b in (2, 3) for c in (4, 5)]
    return validate_fan(3, rays, cones)[0]


@functools.lru_cache(maxsize=None)
def p3_like_fan():
    rays = [(1, 0, 0), (0, 1, 0), (0, 0, 1), (-1, -1, -1)]
    cones = [(0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3)]
    return validate_fan(3, rays, cones)[0]


@functools.lru_cache(maxsize=None)
def flip_fan():
    rays = [(1, 0, 1), (-1, 0, 1), (0, 1, 1), (0, -1, 1), (0, 0, -1)]
    cones = [(0, 1, 2), (0, 1, 3), (0, 2, 4), (1, 2, 4), (1, 3, 4), (0, 3, 4)]
    return validate_fan(3, rays, cones)[0]


@functools.lru_cache(maxsize=None)
def square_cone_fan():
    return validate_fan(
        3, [(1, 0, 1), (0, 1, 1), (-1, 0, 1), (0, -1, 1)], [(0, 1, 2, 3)]
    )[0]


_FAN_CACHE = {}


def cached_fan(rank, rays, cones):
    key = (rank, tuple(rays), tuple(cones))
    if key not in _FAN_CACHE:
        _FAN_CACHE[key] = Fan(rank, rays, cones)
    return _FAN_CACHE[key]


# -- randomized generators --------------------------------------------------

_EXTRA_RAYS_2D = [
    (1, 1), (1, 2), (2, 1), (-1, 1), (-1, 2), (-2, 1), (-1, -1), (-2, -1),
    (-1, -2), (1, -1), (2, -1), (1, -2), (3, 1), (1, 3), (-3, -2),
]


def random_complete_fan_2d(rng):
    rays = {(1, 0), (0, 1), (-1, 0), (0, -1)}
    for v in rng.sample(_EXTRA_RAYS_2D, rng.randrange(0, 4)):
        rays.add(v)
    ordered = sorted(rays, key=lambda v: math.atan2(v[1], v[0]))
    cones = [
        tuple(sorted((i, (i + 1) % len(ordered)))) for i in range(len(ordered))
    ]
    return cached_fan(2, tuple(ordered), tuple(sorted(cones)))


def random_complete_fan_3d(rng):
    fan = rng.choice([octahedron_fan, p3_like_fan, flip_fan])()
    for _ in range(rng.randrange(0, 3)):
        cone = rng.choice(fan.max_cones)
        weights = [rng.randrange(1, 3) for _ in cone]
        point = tuple(
            sum(w * fan.rays[i][k] for w, i in zip(weights, cone))
            for k in range(3)
        )
        u = primitive_vector(point)
        if fan.ray_index(u) is None:
            fan = cached_fan(*_subdivided_key(fan, u))
    return fan


def _subdivided_key(fan, u):
    sub = fan.star_subdivide(u)
    return (sub.rank, sub.rays, sub.max_cones)


def random_complete_fan(rng, rank):
    return random_complete_fan_2d(rng) if rank == 2 else random_complete_fan_3d(rng)


_GAUSS_POOL = [
    GaussRat(0), GaussRat(1), GaussRat(-1), GaussRat(2), I, -I,
    GaussRat(1, 1), GaussRat(0, 2), GaussRat(-1, 1), GaussRat(1, -1),
]


def random_subspace(rng, rank, rays=None):
    mode = rng.randrange(0, 4)
    if mode == 0:
        return GaussianSubspace(rank, [])
    if mode == 1:
        return GaussianSubspace.full(rank)
    if mode == 2 and rays:
        k = rng.randrange(1, rank + 1)
        picks = rng.sample(list(rays), min(k, len(rays)))
        return GaussianSubspace(rank, [tuple(GaussRat(x) for x in r) for r in picks])
    k = rng.randrange(1, rank + 1)
    vecs = []
    for _ in range(k):
        vecs.append(tuple(rng.choice(_GAUSS_POOL) for _ in range(rank)))
    return GaussianSubspace(rank, vecs)


def random_simplicial_cone(rng, rank, max_coord=4):
    """Generators of a strongly convex simplicial cone with small coordinates."""
    while True:
        k = rng.randrange(1, rank + 1)
        gens = []
        for _ in range(k):
            while True:
                v = tuple(rng.randrange(-max_coord, max_coord + 1) for _ in range(rank))
                if any(v):
                    gens.append(primitive_vector(v))
                    break
        from fractions import Fraction

        if matrix_rank([tuple(Fraction(x) for x in g) for g in gens]) == k:
            if len(set(gens)) == k:
                return gens


def random_pair(rng, rank):
    fan = random_complete_fan(rng, rank)
    W = random_subspace(rng, rank, rays=fan.rays)
    return ToricFoliatedPair(fan, W)
