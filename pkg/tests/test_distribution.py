"""Tests for finite distributions and the entropy-preserving merge calculus."""

import math

import numpy as np
import pytest

from entroset.distribution import (
    DistributionError,
    FeasibilityError,
    FiniteDistribution,
    dump_distribution,
    joint_entropy_optimum,
    load_distribution,
    merge_atoms,
    random_distribution,
    reduce_steps,
    reduce_support,
    scaled_entropy_margin,
    squared_merge_margin,
)
from entroset.kernel import binary_entropy, entropy_rate, inverse_entropy_rate

# Frozen merge oracle for (0.5, 0.3) + (0.5, 0.9): solved independently by
# bisecting H(y)/y = (0.5 H(0.3) + 0.5 H(0.9)) / 0.6 with mpmath at 60
# digits, 250 iterations.
ORACLE_Y = 0.7377415277527126
ORACLE_Q = 0.8132929724421275


class TestConstruction:
    def test_sorts_and_normalizes(self):
        d = FiniteDistribution([(0.5, 0.9), (0.25, 0.1), (0.25, 0.5)])
        assert d.atoms == ((0.25, 0.1), (0.25, 0.5), (0.5, 0.9))
        assert d.mean() == pytest.approx(0.6)

    def test_renormalizes_small_weight_drift(self):
        d = FiniteDistribution([(0.5 + 3e-10, 0.2), (0.5, 0.8)])
        assert math.fsum(w for w, _ in d.atoms) == pytest.approx(1.0, abs=1e-15)

    def test_drops_zero_weights_and_snaps_tiny_values(self):
        d = FiniteDistribution([(0.0, 0.7), (1.0, 1e-16)])
        assert d.atoms == ((1.0, 0.0),)
        assert d.zero_mass() == 1.0

    def test_coalesces_equal_values(self):
        d = FiniteDistribution([(0.25, 0.5), (0.25, 0.5), (0.5, 0.9)])
        assert len(d.atoms) == 2
        assert d.atoms[0] == (0.5, 0.5)

    def test_rejects_bad_input(self):
        with pytest.raises(DistributionError):
            FiniteDistribution([])
        with pytest.raises(DistributionError):
            FiniteDistribution([(-0.5, 0.5), (1.5, 0.6)])
        with pytest.raises(DistributionError):
            FiniteDistribution([(0.6, 0.5)])  # sum far from 1
        with pytest.raises(Exception):
            FiniteDistribution([(1.0, 1.5)])  # value out of range

    def test_moments(self):
        d = FiniteDistribution([(0.5, 0.25), (0.5, 0.75)])
        assert d.mean() == 0.5
        h = 0.5 * binary_entropy(0.25) + 0.5 * binary_entropy(0.75)
        assert d.expected_entropy() == pytest.approx(h, abs=1e-15)
        joint = sum(
            wi * wj * binary_entropy(vi * vj)
            for wi, vi in d.atoms
            for wj, vj in d.atoms
        )
        assert d.expected_joint_entropy() == pytest.approx(joint, abs=1e-14)


class TestMerge:
    def test_frozen_oracle(self):
        r = merge_atoms(0.5, 0.3, 0.5, 0.9)
        assert r.y == pytest.approx(ORACLE_Y, abs=1e-12)
        assert r.q == pytest.approx(ORACLE_Q, abs=1e-12)

    def test_conservation_identities(self):
        rng = np.random.default_rng(7)
        for _ in range(500):
            p1, p2 = rng.uniform(0.05, 0.95, size=2)
            x1, x2 = rng.uniform(1e-6, 1.0, size=2)
            r = merge_atoms(p1, x1, p2, x2)
            mass = p1 * x1 + p2 * x2
            ent = p1 * binary_entropy(x1) + p2 * binary_entropy(x2)
            assert r.q * r.y == pytest.approx(mass, abs=1e-10)
            assert r.q * binary_entropy(r.y) == pytest.approx(ent, abs=1e-10)
            assert r.q <= p1 + p2 + 1e-12
            assert r.residual_at_zero >= 0.0

    def test_equal_values_short_circuit(self):
        r = merge_atoms(0.3, 0.4, 0.2, 0.4)
        assert (r.q, r.y, r.residual_at_zero) == (0.5, 0.4, 0.0)

    def test_rejects_degenerate_inputs(self):
        with pytest.raises(DistributionError):
            merge_atoms(0.0, 0.5, 0.5, 0.6)
        with pytest.raises(Exception):
            merge_atoms(0.5, 0.0, 0.5, 0.6)  # value 0 not mergeable

    def test_scaled_margin_nonnegative_on_z_grid(self):
        rng = np.random.default_rng(11)
        for _ in range(50):
            p1, p2 = rng.uniform(0.05, 0.95, size=2)
            x1, x2 = rng.uniform(1e-4, 1.0, size=2)
            for z in np.linspace(0.0, 1.0, 21):
                assert scaled_entropy_margin(p1, x1, p2, x2, float(z)) >= -1e-9

    def test_scaled_margin_tight_at_endpoints(self):
        m1 = scaled_entropy_margin(0.5, 0.3, 0.5, 0.9, 1.0)
        m0 = scaled_entropy_margin(0.5, 0.3, 0.5, 0.9, 0.0)
        assert abs(m1) <= 1e-10
        assert m0 == 0.0

    def test_squared_margin_nonnegative(self):
        rng = np.random.default_rng(13)
        for _ in range(300):
            p1, p2 = rng.uniform(0.05, 0.95, size=2)
            x1, x2 = rng.uniform(1e-4, 1.0, size=2)
            assert squared_merge_margin(p1, x1, p2, x2) >= -1e-9


class TestReduction:
    def test_reduces_to_single_nonzero_atom(self):
        rng = np.random.default_rng(3)
        for _ in range(100):
            d = random_distribution(rng, max_atoms=12)
            r = reduce_support(d)
            assert len(r.nonzero_atoms()) <= 1
            assert abs(r.mean() - d.mean()) <= 1e-8
            assert abs(r.expected_entropy() - d.expected_entropy()) <= 1e-8

    def test_joint_entropy_never_increases(self):
        rng = np.random.default_rng(5)
        for _ in range(40):
            d = random_distribution(rng, n_atoms=8)
            prev = d.expected_joint_entropy()
            for step in reduce_steps(d):
                cur = step.expected_joint_entropy()
                assert cur <= prev + 1e-8
                prev = cur

    def test_idempotent(self):
        d = FiniteDistribution([(0.4, 0.2), (0.6, 0.7)])
        once = reduce_support(d)
        twice = reduce_support(once)
        assert once.atoms == twice.atoms

    def test_matches_descending_order_reimplementation(self):
        # The package merges the two smallest values first.  Merging the
        # two largest instead must land on the same fixed point, because
        # the endpoint is pinned by (mean, entropy) alone.
        def reduce_descending(d):
            cur = d
            while True:
                nz = sorted(cur.nonzero_atoms(), key=lambda a: -a[1])
                if len(nz) <= 1:
                    return cur
                (p1, x1), (p2, x2) = nz[0], nz[1]
                r = merge_atoms(p1, x1, p2, x2)
                atoms = [(r.q, r.y), *nz[2:]]
                z = cur.zero_mass() + r.residual_at_zero
                if z > 0.0:
                    atoms.append((z, 0.0))
                cur = FiniteDistribution(atoms)

        rng = np.random.default_rng(17)
        for _ in range(60):
            d = random_distribution(rng, n_atoms=6)
            a = reduce_support(d).nonzero_atoms()
            b = reduce_descending(d).nonzero_atoms()
            if not a or not b:
                assert a == b
                continue
            assert a[0][1] == pytest.approx(b[0][1], abs=1e-7)
            assert a[0][0] == pytest.approx(b[0][0], abs=1e-7)

    def test_endpoint_matches_certificate(self):
        rng = np.random.default_rng(19)
        for _ in range(100):
            d = random_distribution(rng, n_atoms=5)
            t, u = d.mean(), d.expected_entropy()
            if not (0.0 < t < 1.0) or u <= 0.0:
                continue
            cert = joint_entropy_optimum(t, min(u, binary_entropy(t)))
            r = reduce_support(d)
            nz = r.nonzero_atoms()
            assert len(nz) == 1
            assert nz[0][1] == pytest.approx(cert.v, abs=1e-7)
            assert nz[0][0] == pytest.approx(cert.t / cert.v, abs=1e-7)


class TestOptimum:
    def test_full_entropy_forces_single_atom(self):
        t = 0.25
        cert = joint_entropy_optimum(t, binary_entropy(t))
        assert cert.v == pytest.approx(t, abs=1e-9)
        assert cert.witness.nonzero_atoms()[0][0] == pytest.approx(1.0, abs=1e-9)

    def test_witness_achieves_the_constraints_and_value(self):
        t, u = 0.3, 0.6
        cert = joint_entropy_optimum(t, u)
        w = cert.witness
        assert w.mean() == pytest.approx(t, abs=1e-10)
        assert w.expected_entropy() == pytest.approx(u, abs=1e-9)
        assert w.expected_joint_entropy() == pytest.approx(cert.optimum, abs=1e-10)
        assert cert.v == pytest.approx(inverse_entropy_rate(u / t), abs=1e-12)
        assert cert.v >= t

    def test_random_distributions_never_beat_it(self):
        rng = np.random.default_rng(23)
        for _ in range(200):
            d = random_distribution(rng, max_atoms=5)
            t, u = d.mean(), d.expected_entropy()
            if not (0.0 < t < 1.0) or u <= 0.0:
                continue
            cert = joint_entropy_optimum(t, min(u, binary_entropy(t)))
            assert d.expected_joint_entropy() >= cert.optimum - 1e-9

    def test_feasibility_errors(self):
        with pytest.raises(FeasibilityError):
            joint_entropy_optimum(0.0, 0.5)
        with pytest.raises(FeasibilityError):
            joint_entropy_optimum(1.0, 0.5)
        with pytest.raises(FeasibilityError):
            joint_entropy_optimum(0.3, 0.0)
        with pytest.raises(FeasibilityError):
            joint_entropy_optimum(0.3, binary_entropy(0.3) + 1e-6)
        # within the acceptance slack for u just above H(t)
        cert = joint_entropy_optimum(0.3, binary_entropy(0.3) + 1e-13)
        assert cert.v == pytest.approx(0.3, abs=1e-9)


class TestSerialization:
    def test_text_round_trip_is_exact(self):
        d = FiniteDistribution([(1 / 3, 0.1), (1 / 3, 0.5), (1 / 3, 0.9)])
        again = FiniteDistribution.from_text(d.to_text())
        assert again.atoms == d.atoms

    def test_comments_and_renormalization(self):
        text = "# header\n0.5 0.2  # inline\n\n0.5000001 0.8\n"
        d = FiniteDistribution.from_text(text)
        assert len(d.atoms) == 2
        assert math.fsum(w for w, _ in d.atoms) == pytest.approx(1.0, abs=1e-15)

    def test_parse_errors(self):
        for text in ("", "0.5 x\n0.5 0.2", "0.5\n", "0.7 0.2\n0.7 0.3\n"):
            with pytest.raises(DistributionError):
                FiniteDistribution.from_text(text)

    def test_file_round_trip(self, tmp_path):
        d = FiniteDistribution([(0.25, 0.3), (0.75, 0.8)])
        path = tmp_path / "d.txt"
        dump_distribution(d, path)
        assert load_distribution(path).atoms == d.atoms


class TestRandomDistribution:
    def test_respects_atom_bounds(self):
        rng = np.random.default_rng(29)
        for _ in range(50):
            d = random_distribution(rng, max_atoms=4)
            assert 1 <= len(d.atoms) <= 4 + 1  # coalescing can only shrink
            assert math.fsum(w for w, _ in d.atoms) == pytest.approx(1.0, abs=1e-12)
        pinned = random_distribution(rng, n_atoms=7)
        assert len(pinned.atoms) <= 7

    def test_rejects_zero_atoms(self):
        rng = np.random.default_rng(31)
        with pytest.raises(DistributionError):
            random_distribution(rng, n_atoms=0)
