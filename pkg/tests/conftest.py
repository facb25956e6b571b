import random
from itertools import product as cartesian

import pytest

from enhomology.algdata import (
    exterior_generator,
    load_and_validate_algebra,
    trivial_algebra,
    trivial_coefficients,
    truncated_polynomial,
    unital_extension,
)
from enhomology.coeff import RATIONALS, prime_field

FIELDS = [RATIONALS, prime_field(2), prime_field(3)]


def random_dg_algebra(rng: random.Random, index: int):
    """Zero-product algebra with a random differential; generators split into sources and cycles."""
    g = rng.randint(1, 3)
    degrees = [rng.randint(0, 2) for _ in range(g)]
    names = [f"g{i}" for i in range(g)]
    cycles = [i for i in range(g) if rng.random() < 0.5]
    differential = []
    for i in range(g):
        if i in cycles:
            continue
        targets = [j for j in cycles if degrees[j] == degrees[i] - 1]
        terms = [{'basis': names[j], 'coeff': str(rng.choice([1, -1, 2]))} for j in targets if rng.random() < 0.7]
        if terms:
            differential.append({'on': names[i], 'result': terms})
    document = {
        'basis': [{'name': n, 'degree': d} for n, d in zip(names, degrees)],
        'differential': differential,
    }
    return load_and_validate_algebra(document, name=f"random{index}")


def _monomial_name(exponents):
    return ''.join(f"g{i}" + (f"p{e}" if e > 1 else "") for i, e in enumerate(exponents) if e)


def _monomial_sign(u, v, degrees):
    # moving each generator of v left past the later generators of u
    exponent = sum(u[i] * v[j] * degrees[i] * degrees[j]
                   for i in range(len(u)) for j in range(i))
    return -1 if exponent % 2 else 1


def random_monomial_algebra(rng: random.Random, index: int, max_size: int = 4, max_degree: int = 6):
    """Augmentation ideal of a free graded-commutative algebra modulo a random monomial ideal."""
    g = rng.randint(1, 3)
    degrees = [rng.choice([0, 1, 1, 2, 3, 4, 5, 6]) for _ in range(g)]
    caps = [1 if d % 2 else rng.randint(1, 3) for d in degrees]
    if not any(degrees):
        max_size = 3
    kept = []
    for i in range(g):
        unit = tuple(int(j == i) for j in range(g))
        kept.append(unit)
    candidates = [e for e in cartesian(*(range(c + 1) for c in caps)) if sum(e) > 1]
    candidates.sort(key=lambda e: (sum(e), e))
    for e in candidates:
        if len(kept) >= max_size:
            break
        if sum(a * b for a, b in zip(e, degrees)) > max_degree:
            continue
        below = [tuple(x - (j == i) for j, x in enumerate(e)) for i in range(g) if e[i]]
        if all(sum(b) == 0 or b in kept for b in below) and rng.random() < 0.6:
            kept.append(e)
    products = []
    for u, v in cartesian(kept, kept):
        w = tuple(a + b for a, b in zip(u, v))
        result = []
        if w in kept:
            result = [{'basis': _monomial_name(w), 'coeff': str(_monomial_sign(u, v, degrees))}]
        products.append({'left': _monomial_name(u), 'right': _monomial_name(v), 'result': result})
    document = {
        'basis': [{'name': _monomial_name(e), 'degree': sum(a * b for a, b in zip(e, degrees))} for e in kept],
        'products': products,
    }
    return load_and_validate_algebra(document, name=f"monomial{index}")


def random_algebras(count: int, seed: int = 20240611):
    """Alternates monomial quotients with nonzero products and zero-product dg algebras."""
    rng = random.Random(seed)
    return [random_monomial_algebra(rng, i) if i % 2 == 0 else random_dg_algebra(rng, i)
            for i in range(count)]


@pytest.fixture
def trunc3():
    return truncated_polynomial(3)


@pytest.fixture
def dual_numbers():
    return trivial_algebra(1, [0])


@pytest.fixture
def dg_pair():
    """x in degree 1 with dx = y, y in degree 0, all products zero."""
    document = {
        'basis': [{'name': 'x', 'degree': 1}, {'name': 'y', 'degree': 0}],
        'differential': [{'on': 'x', 'result': [{'basis': 'y', 'coeff': '1'}]}],
    }
    return load_and_validate_algebra(document, name="dg_pair")


def odd_pair():
    """x, y in degree 1 with xy = z."""
    document = {
        'basis': [{'name': 'x', 'degree': 1}, {'name': 'y', 'degree': 1}, {'name': 'z', 'degree': 2}],
        'products': [{'left': 'x', 'right': 'y', 'result': [{'basis': 'z', 'coeff': '1'}]}],
    }
    return load_and_validate_algebra(document, name="odd_pair")


def mixed_pair():
    """w in degree 0, x in degree 1 with wx = v."""
    document = {
        'basis': [{'name': 'w', 'degree': 0}, {'name': 'x', 'degree': 1}, {'name': 'v', 'degree': 1}],
        'products': [{'left': 'w', 'right': 'x', 'result': [{'basis': 'v', 'coeff': '1'}]}],
    }
    return load_and_validate_algebra(document, name="mixed_pair")


def builtin_algebras():
    return [
        trivial_algebra(1, [0]),
        trivial_algebra(2, [0, 1]),
        truncated_polynomial(3),
        truncated_polynomial(4),
        truncated_polynomial(3, 2),
        exterior_generator(1),
        exterior_generator(2),
        odd_pair(),
        mixed_pair(),
    ]


def graded_algebras():
    """Fixtures whose augmentation ideal, and so A_+, is not concentrated in degree 0."""
    return [
        trivial_algebra(2, [0, 1]),
        truncated_polynomial(3, 2),
        exterior_generator(1),
        exterior_generator(2),
        odd_pair(),
        mixed_pair(),
    ]


def module_choices(A):
    return [trivial_coefficients(A), unital_extension(A)]
