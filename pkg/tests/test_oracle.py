import math

import pytest

from bagsim.errors import ImpossibleEvidence, TooManyLeaves
from bagsim.graph import AttackGraph, Node, NodeKind, decompose_to_leaf_probabilities
from bagsim.oracle import exact_access, exact_conditional, exact_evidence_mass


def or_chain(n_leaves: int, prior: float, kind: NodeKind) -> AttackGraph:
    nodes = [Node(i, NodeKind.LEAF, local_prob=prior) for i in range(n_leaves)]
    nodes.append(Node(n_leaves, kind, local_prob=1.0))
    return AttackGraph(nodes, [(i, n_leaves) for i in range(n_leaves)])


class TestExactAccess:
    def test_or_gate_closed_form(self, two_leaf_or):
        # (1 - 0.5^2) * 0.8
        assert exact_access(two_leaf_or)[2].probability == pytest.approx(0.6, abs=1e-12)

    def test_single_leaf(self):
        graph = AttackGraph([Node(0, NodeKind.LEAF, local_prob=0.37)])
        assert exact_access(graph)[0].probability == pytest.approx(0.37, abs=1e-15)

    def test_and_of_two_halves(self):
        graph = or_chain(2, 0.5, NodeKind.AND)
        assert exact_access(graph)[2].probability == pytest.approx(0.25, abs=1e-15)

    @pytest.mark.parametrize("n,q", [(3, 0.3), (5, 0.7)])
    def test_or_duality(self, n, q):
        graph = or_chain(n, q, NodeKind.OR)
        assert exact_access(graph)[n].probability == pytest.approx(
            1 - (1 - q) ** n, abs=1e-12
        )

    @pytest.mark.parametrize("n,q", [(3, 0.3), (5, 0.7)])
    def test_and_duality(self, n, q):
        graph = or_chain(n, q, NodeKind.AND)
        assert exact_access(graph)[n].probability == pytest.approx(q**n, abs=1e-12)

    def test_leaf_cap(self):
        graph = or_chain(26, 0.5, NodeKind.OR)
        with pytest.raises(TooManyLeaves):
            exact_access(graph)

    def test_enterprise_goal(self, enterprise):
        # chain of hand-computed gate algebra over the fixture priors
        assert exact_access(enterprise)[1].probability == pytest.approx(0.837, abs=1e-12)


class TestExactConditional:
    def test_or_gate_posterior(self, two_leaf_or):
        cond = exact_conditional(two_leaf_or, {2: True})
        assert cond[0].probability == pytest.approx(2 / 3, abs=1e-12)

    def test_self_evidence(self, two_leaf_or):
        cond = exact_conditional(two_leaf_or, {0: True})
        assert cond[0].probability == 1.0
        assert cond[2].probability == pytest.approx(0.8, abs=1e-12)

    def test_impossible_evidence(self, two_leaf_or):
        broken = two_leaf_or.with_local_prob(2, 0.0)
        with pytest.raises(ImpossibleEvidence):
            exact_conditional(broken, {2: True})

    def test_empty_equals_access(self, enterprise):
        access = exact_access(enterprise)
        cond = exact_conditional(enterprise, {})
        for node_id in enterprise.ids:
            assert cond[node_id].probability == access[node_id].probability

    def test_enterprise_known_posteriors(self, enterprise):
        assert exact_conditional(enterprise, {6: True})[1].probability == pytest.approx(
            0.9, abs=1e-12
        )
        assert exact_conditional(enterprise, {17: False})[1].probability == 0.0

    def test_monotone_in_necessary_leaf(self, enterprise):
        base = exact_access(enterprise)[1].probability
        up = exact_conditional(enterprise, {17: True})[1].probability
        down = exact_conditional(enterprise, {17: False})[1].probability
        assert down == 0.0 <= base <= up

    def test_total_probability_identity(self, enterprise):
        access = exact_access(enterprise)
        for leaf in enterprise.leaf_ids:
            prior = enterprise.node(leaf).local_prob
            if not 0.0 < prior < 1.0:
                continue
            on = exact_conditional(enterprise, {leaf: True})
            off = exact_conditional(enterprise, {leaf: False})
            for node_id in enterprise.ids:
                combined = off[node_id].probability * (1 - prior) + on[
                    node_id
                ].probability * prior
                assert math.isclose(
                    combined, access[node_id].probability, abs_tol=1e-12
                )


class TestDecompositionEquivalence:
    def test_or_gate(self, two_leaf_or, two_leaf_or_decomposed):
        before = exact_access(two_leaf_or)
        after = exact_access(two_leaf_or_decomposed)
        for node_id in two_leaf_or.ids:
            assert math.isclose(
                before[node_id].probability, after[node_id].probability, abs_tol=1e-12
            )

    def test_enterprise(self, enterprise):
        before = exact_access(enterprise)
        after = exact_access(decompose_to_leaf_probabilities(enterprise))
        for node_id in enterprise.ids:
            assert math.isclose(
                before[node_id].probability, after[node_id].probability, abs_tol=1e-12
            )


class TestEvidenceMass:
    def test_known_mass(self, two_leaf_or):
        assert exact_evidence_mass(two_leaf_or, {2: True}) == pytest.approx(0.6, abs=1e-12)

    def test_empty_mass(self, two_leaf_or):
        assert exact_evidence_mass(two_leaf_or, {}) == 1.0

    def test_zero_mass(self, two_leaf_or):
        broken = two_leaf_or.with_local_prob(2, 0.0)
        assert exact_evidence_mass(broken, {2: True}) == 0.0
