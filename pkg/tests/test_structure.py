"""Graph structure, common/dependent parts, intercepts and their witnesses."""

import numpy as np
import pytest

from tensionkit import (
    Alphabet,
    Direction,
    JointPMF,
    bit_ot,
    characteristic_graph,
    common_part,
    connected_example,
    dependent_part,
    gk_common_information,
    intercept_witnesses,
    intercepts_exact,
    is_perfectly_resolvable,
    mutual_information,
    string_ot_pair,
    tension_of,
    uniform_common,
    z_source,
)
from conftest import random_block_joint, random_joint

H2_005 = 0.28639695711595614  # binary entropy of 0.05, frozen


def diag_pair(n=2):
    return JointPMF(Alphabet.of_size(n), Alphabet.of_size(n), np.eye(n) / n)


class TestCharacteristicGraph:
    def test_z_source_one_component(self):
        g = characteristic_graph(z_source(0.25).joint)
        assert g.n_components == 1
        assert len(g.edges) == 3

    def test_diagonal_two_components(self):
        g = characteristic_graph(diag_pair(2))
        assert g.n_components == 2

    def test_bit_ot_eight_cycle(self):
        g = characteristic_graph(bit_ot().joint)
        assert g.n_components == 1
        assert len(g.edges) == 8
        assert all(g.x_degree(i) == 2 for i in range(4))
        assert all(g.y_degree(i) == 2 for i in range(4))

    def test_component_ids_deterministic(self, rng):
        j = random_block_joint(rng, resolvable=True)
        g1 = characteristic_graph(j)
        g2 = characteristic_graph(j)
        assert np.array_equal(g1.x_component, g2.x_component)
        # ids increase with the smallest member index
        firsts = [np.nonzero(g1.x_component == c)[0] for c in range(g1.n_components)]
        mins = [f[0] if f.size else np.inf for f in firsts]
        finite = [m for m in mins if np.isfinite(m)]
        assert finite == sorted(finite)

    def test_zero_symbols_isolated(self):
        m = np.array([[0.5, 0.5], [0.0, 0.0]])
        g = characteristic_graph(JointPMF(Alphabet.of_size(2), Alphabet.of_size(2), m))
        assert g.n_components == 2  # x1 is isolated


class TestCommonPartAndGK:
    def test_uniform_common_gk(self):
        for k in (2, 4):
            assert abs(gk_common_information(uniform_common(k, 2, 3).joint) - np.log2(k)) < 1e-12

    def test_z_source_gk_zero(self):
        assert gk_common_information(z_source(0.25).joint) == 0.0

    def test_independent_full_support_gk_zero(self, rng):
        j = random_joint(rng, sparsity=0.0)
        assert gk_common_information(j) == 0.0

    def test_gk_plus_tz_equals_mi(self, rng):
        for resolvable in (True, False):
            for _ in range(10):
                j = random_block_joint(rng, resolvable)
                assert abs(
                    gk_common_information(j) + intercepts_exact(j).tz - mutual_information(j)
                ) < 1e-9

    def test_gk_discontinuity_of_connected_example(self):
        assert abs(gk_common_information(connected_example(0.0).joint) - 1.0) < 1e-12
        assert gk_common_information(connected_example(0.05).joint) == 0.0


class TestResolvability:
    def test_uniform_common_resolvable(self):
        ok, cp = is_perfectly_resolvable(uniform_common(3, 2, 2).joint)
        assert ok
        assert cp.graph.n_components == 3

    def test_bit_ot_not_resolvable(self):
        ok, _ = is_perfectly_resolvable(bit_ot().joint)
        assert not ok

    def test_independent_resolvable(self, rng):
        j = random_joint(rng)
        m = np.outer(j.x_marginal, j.y_marginal)
        m /= m.sum()
        ok, _ = is_perfectly_resolvable(JointPMF(j.x_alphabet, j.y_alphabet, m))
        assert ok


class TestDependentPart:
    def test_identity_quotient_on_diagonal(self):
        dp = dependent_part(diag_pair(3), Direction.Y_TO_X)
        assert dp.n_classes == 3

    def test_independent_single_class(self, rng):
        j = random_joint(rng)
        m = np.outer(j.x_marginal, j.y_marginal)
        m /= m.sum()
        dp = dependent_part(JointPMF(j.x_alphabet, j.y_alphabet, m), Direction.Y_TO_X)
        assert dp.n_classes == 1

    def test_string_ot_conditional_entropy(self):
        for L in (1, 2):
            dp = dependent_part(string_ot_pair(L).joint, Direction.Y_TO_X)
            assert abs(dp.conditional_entropy_bits - (1 + L)) < 1e-9

    def test_zero_marginal_singleton_flagged(self):
        m = np.array([[0.5, 0.0, 0.2], [0.3, 0.0, 0.0]])
        j = JointPMF(Alphabet.of_size(2), Alphabet(("u", "v", "w")), m)
        dp = dependent_part(j, Direction.Y_TO_X)
        assert "v" in dp.flagged_symbols
        # the zero-marginal symbol sits alone in its class
        assert (dp.class_of == dp.class_of[1]).sum() == 1

    def test_idempotent(self, rng):
        for _ in range(10):
            j = random_joint(rng, sparsity=0.3)
            dp = dependent_part(j, Direction.Y_TO_X)
            # quotient joint: collapse y symbols into their classes
            m = np.zeros((j.nx, dp.n_classes))
            np.add.at(m.T, dp.class_of, j.mass.T)
            qj = JointPMF(j.x_alphabet, Alphabet.of_size(dp.n_classes, "c"), m)
            dp2 = dependent_part(qj, Direction.Y_TO_X)
            assert dp2.n_classes == dp.n_classes
            assert np.array_equal(dp2.class_of, np.arange(dp.n_classes))

    def test_connected_example_quotient_is_block(self):
        dp = dependent_part(connected_example(0.05).joint, Direction.Y_TO_X)
        assert dp.n_classes == 2
        assert abs(dp.conditional_entropy_bits - H2_005) < 1e-12


class TestIntercepts:
    def test_string_ot(self):
        for L in (1, 2):
            ints = intercepts_exact(string_ot_pair(L).joint)
            assert np.allclose(ints.as_tuple(), (1 + L, 1 + L, 2 * L), atol=1e-9)

    def test_bit_ot(self):
        assert np.allclose(intercepts_exact(bit_ot().joint).as_tuple(), (1, 1, 1), atol=1e-9)

    def test_independent(self, rng):
        j = random_joint(rng)
        m = np.outer(j.x_marginal, j.y_marginal)
        m /= m.sum()
        ints = intercepts_exact(JointPMF(j.x_alphabet, j.y_alphabet, m))
        assert np.allclose(ints.as_tuple(), (0, 0, 0), atol=1e-9)

    def test_z_source_limit(self):
        small = intercepts_exact(z_source(1e-6).joint)
        assert small.max_norm() < 1e-4

    def test_resolvable_iff_zero_intercepts(self, rng):
        for resolvable in (True, False):
            for _ in range(15):
                j = random_block_joint(rng, resolvable)
                ok, _ = is_perfectly_resolvable(j)
                ints = intercepts_exact(j)
                assert ok == (ints.max_norm() <= 1e-9)

    def test_witnesses_achieve_intercepts(self, rng):
        for _ in range(15):
            j = random_joint(rng, sparsity=0.25)
            ints = intercepts_exact(j)
            ws = intercept_witnesses(j)
            assert np.allclose(
                tension_of(j, ws["tx"]).as_tuple(), (ints.tx, 0, 0), atol=1e-9
            )
            assert np.allclose(
                tension_of(j, ws["ty"]).as_tuple(), (0, ints.ty, 0), atol=1e-9
            )
            assert np.allclose(
                tension_of(j, ws["tz"]).as_tuple(), (0, 0, ints.tz), atol=1e-9
            )

    def test_tz_bounded_by_mutual_information(self, rng):
        for _ in range(10):
            j = random_joint(rng, sparsity=0.2)
            assert intercepts_exact(j).tz <= mutual_information(j) + 1e-12


class TestCommonPartChannel:
    def test_channel_is_function_of_each_side_on_support(self, rng):
        j = random_block_joint(rng, resolvable=False)
        cp = common_part(j)
        for xi, yi in characteristic_graph(j).edges:
            assert cp.x_component[xi] == cp.y_component[yi]
