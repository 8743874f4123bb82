"""Probability core: entropies, informations, tension, serialization."""

import json
import math

import numpy as np
import pytest

from tensionkit import (
    Alphabet,
    AlphabetMismatchError,
    Channel,
    DeterministicChannel,
    DimensionMismatchError,
    ExtendedJoint,
    JointPMF,
    TensionPoint,
    ValidationError,
    binary_entropy,
    bit_ot,
    conditional_mutual_information,
    entropy,
    joint_from_json,
    joint_to_json,
    mutual_information,
    product,
    tension_of,
    total_variation,
    z_source,
)
from conftest import random_channel, random_joint

# frozen expected values, evaluated independently from the closed forms
H_THIRD_TWOTHIRDS = 0.9182958340544896
H2_011 = 0.499915958164528


class TestEntropy:
    def test_uniform_bit(self):
        assert entropy([0.5, 0.5]) == 1.0

    def test_point_mass(self):
        assert entropy([1.0, 0.0, 0.0]) == 0.0

    def test_third_twothirds(self):
        assert abs(entropy([1 / 3, 2 / 3]) - H_THIRD_TWOTHIRDS) < 1e-12

    def test_rejects_negative(self):
        with pytest.raises(ValidationError):
            entropy([1.2, -0.2])

    def test_rejects_unnormalized(self):
        with pytest.raises(ValidationError):
            entropy([0.5, 0.6])

    def test_no_negative_zero(self):
        assert math.copysign(1.0, entropy([1.0])) == 1.0


class TestBinaryEntropy:
    def test_fair_coin(self):
        assert binary_entropy(0.5) == 1.0

    def test_endpoints(self):
        assert binary_entropy(0.0) == 0.0
        assert binary_entropy(1.0) == 0.0

    def test_011(self):
        assert abs(binary_entropy(0.11) - H2_011) < 1e-12

    def test_symmetry(self, rng):
        for p in rng.random(20):
            assert abs(binary_entropy(p) - binary_entropy(1.0 - p)) < 1e-12

    def test_out_of_range(self):
        with pytest.raises(ValidationError):
            binary_entropy(1.5)


class TestJointPMF:
    def test_rejects_bad_sum(self):
        with pytest.raises(ValidationError):
            JointPMF(Alphabet.of_size(2), Alphabet.of_size(2), np.full((2, 2), 0.3))

    def test_rejects_negative_cell(self):
        m = np.array([[0.6, -0.1], [0.3, 0.2]])
        with pytest.raises(ValidationError):
            JointPMF(Alphabet.of_size(2), Alphabet.of_size(2), m)

    def test_rejects_shape_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            JointPMF(Alphabet.of_size(3), Alphabet.of_size(2), np.full((2, 2), 0.25))

    def test_zero_symbols_flagged(self):
        m = np.array([[0.5, 0.5], [0.0, 0.0]])
        j = JointPMF(Alphabet(("a", "b")), Alphabet(("c", "d")), m)
        assert j.zero_x_symbols == ("b",)
        assert j.zero_y_symbols == ()

    def test_alphabet_uniqueness(self):
        with pytest.raises(ValidationError):
            Alphabet(("a", "a"))

    def test_mass_is_immutable(self):
        j = z_source(0.25).joint
        with pytest.raises(ValueError):
            j.mass[0, 0] = 0.5


class TestChannel:
    def test_rejects_bad_row(self):
        k = np.array([[0.5, 0.4], [0.5, 0.5]])
        with pytest.raises(ValidationError) as err:
            Channel(Alphabet.of_size(2, "q"), k)
        assert "row 0" in str(err.value)

    def test_deterministic_matches_dense(self, rng):
        j = random_joint(rng)
        a = rng.integers(0, 3, size=(j.nx, j.ny))
        det = DeterministicChannel.from_assignment(a)
        dense = det.to_dense()
        t1 = tension_of(j, det)
        t2 = tension_of(j, dense)
        assert np.allclose(t1.as_array(), t2.as_array(), atol=1e-9)


class TestConditionalMutualInformation:
    def test_conditioning_on_independent_q(self, rng):
        j = random_joint(rng)
        c = Channel.constant(j.nx * j.ny)
        ext = ExtendedJoint(j, c)
        assert abs(
            conditional_mutual_information(ext, "x", "y", "q") - mutual_information(j)
        ) < 1e-9

    def test_q_equals_x_kills_i_yq_given_x(self, rng):
        j = random_joint(rng)
        assignment = np.broadcast_to(np.arange(j.nx)[:, None], (j.nx, j.ny)).copy()
        c = DeterministicChannel.from_assignment(assignment)
        ext = ExtendedJoint(j, c.to_dense())
        assert conditional_mutual_information(ext, "y", "q", "x") < 1e-9

    def test_bit_ot_constant_q(self):
        j = bit_ot().joint
        ext = ExtendedJoint(j, Channel.constant(16))
        assert abs(conditional_mutual_information(ext, "x", "y", "q") - 1.0) < 1e-9

    def test_rejects_repeated_variables(self, rng):
        j = random_joint(rng)
        ext = ExtendedJoint(j, Channel.constant(j.nx * j.ny))
        with pytest.raises(ValidationError):
            conditional_mutual_information(ext, "x", "x", "q")


class TestTension:
    def test_constant_q(self, rng):
        j = random_joint(rng)
        t = tension_of(j, Channel.constant(j.nx * j.ny))
        assert abs(t.r1) < 1e-12 and abs(t.r2) < 1e-12
        assert abs(t.r3 - mutual_information(j)) < 1e-9

    def test_q_equals_xy(self, rng):
        j = random_joint(rng)
        assignment = np.arange(j.nx * j.ny).reshape(j.nx, j.ny)
        t = tension_of(j, DeterministicChannel.from_assignment(assignment))
        from tensionkit.prob import _entropy_bits

        h_y_given_x = _entropy_bits(j.mass) - _entropy_bits(j.x_marginal)
        h_x_given_y = _entropy_bits(j.mass) - _entropy_bits(j.y_marginal)
        assert abs(t.r1 - h_y_given_x) < 1e-9
        assert abs(t.r2 - h_x_given_y) < 1e-9
        assert abs(t.r3) < 1e-9

    def test_four_term_identity(self, rng):
        # I(X;Y|Q) = I(X;Y) + I(Y;Q|X) + I(X;Q|Y) - I(XY;Q) on random pairs
        for _ in range(50):
            j = random_joint(rng, sparsity=0.2)
            c = random_channel(rng, j)
            ext = ExtendedJoint(j, c)
            i1 = conditional_mutual_information(ext, "y", "q", "x")
            i2 = conditional_mutual_information(ext, "x", "q", "y")
            i3 = conditional_mutual_information(ext, "x", "y", "q")
            from tensionkit.prob import _entropy_bits

            i_xyq = (
                _entropy_bits(j.mass)
                + _entropy_bits(ext.mass3.sum(axis=(0, 1)))
                - _entropy_bits(ext.mass3)
            )
            residual = abs(i3 - (mutual_information(j) + i1 + i2 - i_xyq))
            assert residual < 1e-9

    def test_tension_matches_extended_joint(self, rng):
        for _ in range(25):
            j = random_joint(rng, sparsity=0.15)
            c = random_channel(rng, j)
            t = tension_of(j, c)
            ext = ExtendedJoint(j, c)
            expect = (
                conditional_mutual_information(ext, "y", "q", "x"),
                conditional_mutual_information(ext, "x", "q", "y"),
                conditional_mutual_information(ext, "x", "y", "q"),
            )
            assert np.allclose(t.as_array(), expect, atol=1e-9)

    def test_clamping_guard(self):
        with pytest.raises(ValidationError):
            TensionPoint(-1e-6, 0.0, 0.0)
        p = TensionPoint(-1e-12, 0.0, 0.0)
        assert p.r1 == 0.0

    def test_dimension_mismatch(self, rng):
        j = random_joint(rng, nx=2, ny=2)
        with pytest.raises(DimensionMismatchError):
            tension_of(j, Channel.constant(9))


class TestTotalVariation:
    def test_identical(self):
        j = z_source(0.25).joint
        assert total_variation(j, j) == 0.0

    def test_disjoint(self):
        a = JointPMF(Alphabet.of_size(2), Alphabet.of_size(2), np.array([[1.0, 0.0], [0.0, 0.0]]))
        b = JointPMF(Alphabet.of_size(2), Alphabet.of_size(2), np.array([[0.0, 0.0], [0.0, 1.0]]))
        assert total_variation(a, b) == 1.0

    def test_z_sources(self):
        assert abs(total_variation(z_source(0.25).joint, z_source(0.20).joint) - 0.10) < 1e-12

    def test_alphabet_mismatch(self, rng):
        j = random_joint(rng, nx=2, ny=2)
        k = JointPMF(Alphabet(("u", "v")), j.y_alphabet, j.mass.copy())
        with pytest.raises(AlphabetMismatchError):
            total_variation(j, k)

    def test_triangle_inequality(self, rng):
        for _ in range(30):
            a, b, c = (random_joint(rng, nx=3, ny=3) for _ in range(3))
            assert total_variation(a, c) <= total_variation(a, b) + total_variation(b, c) + 1e-12


class TestProduct:
    def test_point_mass_factor(self, rng):
        j = random_joint(rng)
        unit = JointPMF(Alphabet(("*",)), Alphabet(("*",)), np.array([[1.0]]))
        p = product(j, unit)
        assert np.allclose(p.mass, j.mass)

    def test_uniform_bits(self):
        bit = JointPMF(Alphabet.of_size(2), Alphabet.of_size(2), np.diag([0.5, 0.5]))
        p = product(bit, bit)
        assert p.nx == p.ny == 4
        assert abs(p.mass.max() - 0.25) < 1e-12

    def test_marginals_factor(self, rng):
        j1, j2 = random_joint(rng), random_joint(rng)
        p = product(j1, j2)
        assert np.allclose(
            p.x_marginal, np.outer(j1.x_marginal, j2.x_marginal).ravel(), atol=1e-12
        )

    def test_entropy_additivity(self, rng):
        from tensionkit import joint_entropy

        for _ in range(10):
            j1, j2 = random_joint(rng), random_joint(rng)
            p = product(j1, j2)
            assert abs(joint_entropy(p) - joint_entropy(j1) - joint_entropy(j2)) < 1e-9

    def test_bit_ot_square_alphabet(self):
        j = bit_ot().joint
        p = product(j, j)
        assert p.nx == 16 and p.ny == 16
        assert abs(mutual_information(p) - 2.0) < 1e-9


class TestSerialization:
    def test_round_trip_bit_exact(self, rng):
        for _ in range(10):
            j = random_joint(rng, sparsity=0.2)
            j2 = joint_from_json(joint_to_json(j))
            assert j2.x_alphabet == j.x_alphabet
            assert np.array_equal(j2.mass, j.mass)

    def test_schema_fields(self):
        d = json.loads(joint_to_json(z_source(0.25).joint))
        assert set(d) == {"x_alphabet", "y_alphabet", "pmf"}

    def test_malformed_row_named(self):
        text = json.dumps(
            {"x_alphabet": ["a", "b"], "y_alphabet": ["c"], "pmf": [[0.5], [0.5, 0.1]]}
        )
        with pytest.raises(ValidationError) as err:
            joint_from_json(text)
        assert "row 1" in str(err.value)
