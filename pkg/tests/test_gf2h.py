"""Field layer tests.

The multiplication oracle below is written independently of the library:
schoolbook polynomial multiplication over GF(2) followed by long division,
no shared code with kleinoval.gf2h.
"""

import random

import pytest

from kleinoval.gf2h import GF, FieldElement, field_for_h, field_for_q


def oracle_mul(a: int, b: int, modulus: int) -> int:
    prod = 0
    i = 0
    bb = b
    while bb:
        if bb & 1:
            prod ^= a << i
        bb >>= 1
        i += 1
    dm = modulus.bit_length() - 1
    while prod.bit_length() - 1 >= dm and prod:
        prod ^= modulus << (prod.bit_length() - 1 - dm)
    return prod


ALL_H = [1, 2, 3, 4, 5]


@pytest.mark.parametrize("h", ALL_H)
def test_mul_table_matches_oracle(h):
    f = field_for_h(h)
    for a in range(f.q):
        for b in range(f.q):
            assert f.mul(a, b) == oracle_mul(a, b, f.modulus)


def test_gf4_frozen_values():
    # By hand with modulus x^2+x+1: w=0b10, w*w = w+1 = 0b11, w*(w+1) = 1.
    f = field_for_h(2)
    assert f.mul(2, 2) == 3
    assert f.mul(2, 3) == 1
    assert f.inv(2) == 3
    assert f.sqrt(2) == 3  # (w^2)^2 = w^4 = w
    assert [f.trace(a) for a in range(4)] == [0, 0, 1, 1]


def test_fixed_moduli():
    assert field_for_h(1).modulus == 0b10
    assert field_for_h(2).modulus == 0b111
    assert field_for_h(3).modulus == 0b1011
    assert field_for_h(4).modulus == 0b10011
    assert field_for_h(5).modulus == 0b100101


def test_reducible_modulus_rejected():
    with pytest.raises(ValueError):
        GF(2, 0b110)  # x^2+x = x(x+1)
    with pytest.raises(ValueError):
        GF(4, 0b10101)  # x^4+x^2+1 = (x^2+x+1)^2
    with pytest.raises(ValueError):
        GF(3, 0b1111)  # has root 1


@pytest.mark.parametrize("h", [1, 2, 3])
def test_field_axioms_exhaustive_triples(h):
    f = field_for_h(h)
    q = f.q
    for a in range(q):
        for b in range(q):
            assert f.mul(a, b) == f.mul(b, a)
            for c in range(q):
                assert f.mul(f.mul(a, b), c) == f.mul(a, f.mul(b, c))
                assert f.mul(a, b ^ c) == f.mul(a, b) ^ f.mul(a, c)


@pytest.mark.parametrize("h", [4, 5])
def test_field_axioms_randomized_triples(h):
    f = field_for_h(h)
    rng = random.Random(0)
    for _ in range(10_000):
        a, b, c = (rng.randrange(f.q) for _ in range(3))
        assert f.mul(f.mul(a, b), c) == f.mul(a, f.mul(b, c))
        assert f.mul(a, b ^ c) == f.mul(a, b) ^ f.mul(a, c)


@pytest.mark.parametrize("h", ALL_H)
def test_pairwise_facts_exhaustive(h):
    f = field_for_h(h)
    for a in range(f.q):
        assert f.mul(a, 1) == a
        assert f.mul(a, 0) == 0
        if a:
            assert f.mul(a, f.inv(a)) == 1
        assert f.sqrt(f.mul(a, a)) == a
        assert f.mul(f.sqrt(a), f.sqrt(a)) == a
        for b in range(f.q):
            # Frobenius is additive and multiplicative.
            assert f.frobenius(a ^ b, 1) == f.frobenius(a, 1) ^ f.frobenius(b, 1)
            assert f.frobenius(f.mul(a, b), 1) == f.mul(f.frobenius(a, 1), f.frobenius(b, 1))


@pytest.mark.parametrize("h", ALL_H)
def test_trace_properties(h):
    f = field_for_h(h)
    zeros = [a for a in range(f.q) if f.trace(a) == 0]
    assert len(zeros) == f.q // 2  # trace is a surjective F2-linear map
    for a in range(f.q):
        assert f.trace(a) == f.trace(f.mul(a, a))  # Galois invariance
        for b in range(f.q):
            assert f.trace(a ^ b) == f.trace(a) ^ f.trace(b)


@pytest.mark.parametrize("h", ALL_H)
def test_artin_schreier_criterion(h):
    f = field_for_h(h)
    for d in range(f.q):
        r = f.artin_schreier_root(d)
        if f.trace(d) == 0:
            assert r is not None and f.mul(r, r) ^ r == d
            # smallest root returned; the two roots differ by 1
            assert r <= (r ^ 1)
        else:
            assert r is None
    assert f.artin_schreier_root(0) == 0


@pytest.mark.parametrize("h", ALL_H)
def test_frobenius_period(h):
    f = field_for_h(h)
    for a in range(f.q):
        assert f.frobenius(a, h) == a
        assert f.frobenius(a, 1) == f.mul(a, a)


def test_pickers():
    assert field_for_h(1).pick_omega_irreducible() == 1
    for h in ALL_H:
        f = field_for_h(h)
        d = f.pick_delta_trace_one()
        assert f.trace(d) == 1
        assert all(f.trace(a) == 0 for a in range(d))
        w = f.pick_omega_irreducible()
        assert all(f.mul(x, x) ^ f.mul(w, x) ^ 1 != 0 for x in range(f.q))
    # GF(4): trace-one elements are w and w^2, so delta = w = 0b10.
    assert field_for_h(2).pick_delta_trace_one() == 2


def test_pow_reduction():
    f = field_for_h(2)
    for a in range(1, 4):
        assert f.pow(a, 3) == 1  # a^(q-1)
        assert f.pow(a, 1) == f.pow(a, 4)  # exponent reduced mod q-1
        assert f.pow(a, -1) == f.inv(a)
    assert f.pow(0, 0) == 1
    assert f.pow(0, 5) == 0
    with pytest.raises(ZeroDivisionError):
        f.pow(0, -2)
    # q-3 exponent used by the hyperoval branch function: x^(q-3) = x^-2 for x != 0
    f16 = field_for_h(4)
    for a in range(1, 16):
        assert f16.pow(a, 16 - 3) == f16.inv(f16.mul(a, a))


def test_frobenius_orbit_of_cubic_root_in_gf16():
    # An order-3 element of GF(16)* lies in the GF(4) subfield; its orbit
    # under squaring has size 2.
    f = field_for_h(4)
    g = next(a for a in range(2, 16) if all(f.pow(a, k) != 1 for k in (1, 3, 5)))
    a = f.pow(g, 5)
    assert f.pow(a, 3) == 1 and a != 1
    orbit = {a, f.frobenius(a, 1), f.frobenius(a, 2), f.frobenius(a, 3)}
    assert len(orbit) == 2


def test_field_element_wrapper():
    f4, f8 = field_for_h(2), field_for_h(3)
    w = f4.element(2)
    assert (w * w).bits == 3
    assert (w + w).bits == 0
    assert (w / w).bits == 1
    assert (w**3).bits == 1
    assert w.sqrt().bits == 3
    assert w.trace() == 1
    assert w.hex() == "2"
    assert f4.from_hex("3") == f4.element(3)
    with pytest.raises(ValueError):
        w + f8.element(2)
    with pytest.raises(ValueError):
        FieldElement(f4, 7)
    with pytest.raises(ZeroDivisionError):
        f4.element(0).inverse()


def test_inv_of_zero_raises():
    for h in ALL_H:
        with pytest.raises(ZeroDivisionError):
            field_for_h(h).inv(0)


def test_field_for_q():
    assert field_for_q(16) is field_for_h(4)
    with pytest.raises(ValueError):
        field_for_q(12)


def test_json_roundtrip():
    f = field_for_h(3)
    assert GF.from_json(f.to_json()) == f
