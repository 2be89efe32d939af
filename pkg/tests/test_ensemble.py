"""Ensemble construction, geometry, overlaps, and file loading."""

import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nullrx import (
    CoherentEnsemble,
    PureStateEnsemble,
    build_ppm,
    build_psk,
    coherent_as_pure,
    coherent_overlap,
    difference_energies,
    geometry,
    load_ensemble,
    scale_to_energy,
)

from helpers import random_coherent


def brute_force_delta(states):
    """Pairwise difference energies by explicit double loop."""
    M = len(states)
    out = np.zeros((M, M))
    for i in range(M):
        for j in range(M):
            out[i, j] = sum(abs(a - b) ** 2 for a, b in zip(states[i], states[j]))
    return out


class TestBuildPsk:
    def test_qpsk_layout(self):
        ens = build_psk(4, 1.0)
        assert ens.num_modes == 1
        phases = np.angle(ens.states[:, 0])
        np.testing.assert_allclose(
            np.sort(np.degrees(phases) % 360), [45.0, 135.0, 225.0, 315.0], atol=1e-12
        )
        np.testing.assert_allclose(np.abs(ens.states[:, 0]), 1.0, atol=1e-14)
        np.testing.assert_allclose(ens.priors, 0.25)
        assert ens.avg_energy == pytest.approx(1.0, abs=1e-14)

    @pytest.mark.parametrize("M,N", [(2, 0.0), (2, -1.0), (1, 1.0), (0, 1.0)])
    def test_rejects_bad_arguments(self, M, N):
        with pytest.raises(ValueError):
            build_psk(M, N)

    def test_qpsk_min_delta_is_twice_energy(self):
        ens = build_psk(4, 9.0)
        delta = brute_force_delta(ens.states)
        off = delta[~np.eye(4, dtype=bool)]
        assert off.min() == pytest.approx(18.0, abs=1e-12)


class TestBuildPpm:
    def test_orthogonal_supports(self):
        ens = build_ppm(6, 4.0)
        assert ens.num_modes == 6
        np.testing.assert_allclose(ens.energies, 4.0, atol=1e-12)
        assert ens.avg_energy == pytest.approx(4.0, abs=1e-12)

    def test_all_pairs_at_twice_energy(self):
        for M, N in [(2, 1.0), (4, 2.5), (6, 4.0)]:
            delta = difference_energies(build_ppm(M, N))
            off = delta[~np.eye(M, dtype=bool)]
            np.testing.assert_allclose(off, 2.0 * N, atol=1e-12)

    def test_binary_case(self):
        ens = build_ppm(2, 1.0)
        np.testing.assert_allclose(ens.states, np.eye(2), atol=0)
        assert difference_energies(ens)[0, 1] == pytest.approx(2.0, abs=1e-12)

    def test_rejects_bad_arguments(self):
        with pytest.raises(ValueError):
            build_ppm(2, 0.0)


class TestGeometry:
    def test_qpsk_deltas_and_kappa(self):
        N = 3.0
        g = geometry(build_psk(4, N))
        oracle = brute_force_delta(build_psk(4, N).states)
        np.testing.assert_allclose(g.delta, oracle, atol=1e-12)
        # adjacent pairs at 2N, antipodal at 4N
        assert g.delta[0, 1] == pytest.approx(2 * N, rel=1e-12)
        assert g.delta[0, 2] == pytest.approx(4 * N, rel=1e-12)
        assert g.min_delta == pytest.approx(2 * N, rel=1e-12)
        assert g.kappa == pytest.approx(2.0, rel=1e-12)

    @pytest.mark.parametrize("M", [2, 3, 6, 9])
    def test_ppm_kappa_is_two(self, M):
        assert geometry(build_ppm(M, 1.7)).kappa == pytest.approx(2.0, rel=1e-12)

    def test_bpsk(self):
        ens = CoherentEnsemble(states=[[2.0], [-2.0]], priors=[0.5, 0.5])
        g = geometry(ens)
        assert g.min_delta == pytest.approx(16.0, abs=1e-12)
        assert g.kappa == pytest.approx(4.0, rel=1e-12)

    def test_symmetry_and_zero_diagonal_exact(self, rng):
        for _ in range(10):
            ens = random_coherent(rng)
            delta = difference_energies(ens)
            assert np.array_equal(delta, delta.T)
            assert np.all(np.diag(delta) == 0.0)
            assert np.all(delta >= 0.0)

    def test_all_vacuum_rejected(self):
        ens = CoherentEnsemble(states=[[0.0], [0.0]], priors=[0.5, 0.5])
        with pytest.raises(ValueError, match="vacuum"):
            geometry(ens)

    def test_duplicate_states_warn_with_zero_kappa(self):
        ens = CoherentEnsemble(states=[[1.0], [1.0], [-1.0]], priors=[1 / 3] * 3)
        with pytest.warns(RuntimeWarning, match="duplicate"):
            g = geometry(ens)
        assert g.kappa == 0.0


class TestScaleToEnergy:
    def test_doubling(self):
        ens = build_psk(4, 1.0)
        scaled = scale_to_energy(ens, 4.0)
        np.testing.assert_allclose(scaled.states, 2.0 * ens.states, rtol=1e-15)
        assert scaled.avg_energy == pytest.approx(4.0, rel=1e-14)

    def test_identity(self, rng):
        ens = random_coherent(rng)
        same = scale_to_energy(ens, ens.avg_energy)
        assert np.array_equal(same.states, ens.states)

    def test_kappa_preserved_on_rescale(self):
        ens = build_psk(4, 1.0)
        before = geometry(ens).kappa
        after = geometry(scale_to_energy(ens, 9.0)).kappa
        assert after == pytest.approx(before, abs=1e-12)

    @settings(max_examples=30, deadline=None)
    @given(factor=st.floats(min_value=0.1, max_value=10.0))
    def test_kappa_scale_invariant(self, factor):
        rng = np.random.default_rng(99)
        ens = random_coherent(rng, max_m=4, max_s=3)
        before = geometry(ens).kappa
        after = geometry(scale_to_energy(ens, factor * ens.avg_energy)).kappa
        assert after == pytest.approx(before, abs=1e-12)

    def test_vacuum_rejected(self):
        ens = CoherentEnsemble(states=[[0.0], [0.0]], priors=[0.5, 0.5])
        with pytest.raises(ValueError):
            scale_to_energy(ens, 1.0)


class TestCoherentOverlap:
    def test_self_overlap_is_one(self):
        ens = build_psk(4, 2.0)
        assert coherent_overlap(ens, 1, 1) == pytest.approx(1.0, abs=1e-14)

    @pytest.mark.parametrize("N", [0.3, 1.0, 2.5])
    def test_bpsk_overlap(self, N):
        a = np.sqrt(N)
        ens = CoherentEnsemble(states=[[a], [-a]], priors=[0.5, 0.5])
        assert abs(coherent_overlap(ens, 0, 1)) ** 2 == pytest.approx(
            np.exp(-4 * N), rel=1e-12
        )

    def test_qpsk_adjacent_pair(self):
        ens = build_psk(4, 1.0)
        assert abs(coherent_overlap(ens, 0, 1)) ** 2 == pytest.approx(
            np.exp(-2.0), rel=1e-10
        )

    def test_overlap_delta_identity(self, rng):
        for _ in range(10):
            ens = random_coherent(rng, max_m=4, max_s=3)
            delta = difference_energies(ens)
            for i in range(ens.num_states):
                for j in range(ens.num_states):
                    got = abs(coherent_overlap(ens, i, j)) ** 2
                    assert got == pytest.approx(np.exp(-delta[i, j]), abs=1e-10)

    def test_index_bounds(self):
        ens = build_psk(4, 1.0)
        with pytest.raises(IndexError):
            coherent_overlap(ens, 0, 4)


class TestCoherentAsPure:
    def test_binary_gram_preserved(self, rng):
        ens = random_coherent(rng, max_m=2, max_s=3)
        pure = coherent_as_pure(ens)
        got = np.vdot(pure.vectors[0], pure.vectors[1])
        want = coherent_overlap(ens, 0, 1)
        assert got == pytest.approx(want, abs=1e-12)

    def test_qpsk_fidelities_match_delta(self):
        ens = build_psk(4, 1.0)
        pure = coherent_as_pure(ens)
        delta = difference_energies(ens)
        gram = pure.vectors.conj() @ pure.vectors.T
        np.testing.assert_allclose(np.abs(gram) ** 2, np.exp(-delta), atol=1e-10)

    def test_full_gram_preserved_entrywise(self, rng):
        for _ in range(10):
            ens = random_coherent(rng)
            pure = coherent_as_pure(ens)
            M = ens.num_states
            want = np.array(
                [[coherent_overlap(ens, i, j) for j in range(M)] for i in range(M)]
            )
            got = pure.vectors.conj() @ pure.vectors.T
            np.testing.assert_allclose(got, want, atol=1e-10)

    def test_duplicate_state_drops_rank(self):
        with pytest.warns(RuntimeWarning):
            ens = CoherentEnsemble(states=[[1.0], [1.0], [-1.0]], priors=[1 / 3] * 3)
            geometry(ens)
        pure = coherent_as_pure(ens)
        assert pure.dim < pure.num_states
        np.testing.assert_allclose(
            np.vdot(pure.vectors[0], pure.vectors[1]), 1.0, atol=1e-10
        )

    def test_priors_carried_over(self):
        ens = CoherentEnsemble(states=[[1.0], [-1.0]], priors=[0.3, 0.7])
        assert np.array_equal(coherent_as_pure(ens).priors, ens.priors)


class TestValidation:
    def test_priors_must_sum_to_one(self):
        with pytest.raises(ValueError, match="priors"):
            CoherentEnsemble(states=[[1.0], [2.0]], priors=[0.5, 0.4])

    def test_priors_nonnegative(self):
        with pytest.raises(ValueError, match="priors"):
            CoherentEnsemble(states=[[1.0], [2.0]], priors=[1.2, -0.2])

    def test_ragged_states_name_index(self):
        with pytest.raises(ValueError, match="state 1"):
            CoherentEnsemble(states=[[1.0, 0.0], [1.0]], priors=[0.5, 0.5])

    def test_single_state_rejected(self):
        with pytest.raises(ValueError):
            CoherentEnsemble(states=[[1.0]], priors=[1.0])

    def test_pure_unit_norm_names_index(self):
        with pytest.raises(ValueError, match="vector 1"):
            PureStateEnsemble(vectors=[[1.0, 0.0], [0.5, 0.5]], priors=[0.5, 0.5])

    def test_pure_accepts_normalized(self):
        v = np.sqrt(0.5)
        ens = PureStateEnsemble(vectors=[[1.0, 0.0], [v, v]], priors=[0.5, 0.5])
        assert ens.dim == 2


class TestLoadEnsemble:
    def qpsk_payload(self, N=1.0):
        ens = build_psk(4, N)
        return {
            "kind": "coherent",
            "priors": list(ens.priors),
            "states": [[[z.real, z.imag] for z in row] for row in ens.states],
        }

    def test_round_trip_matches_builder(self, tmp_path):
        path = tmp_path / "qpsk.json"
        path.write_text(json.dumps(self.qpsk_payload(2.0)))
        loaded = load_ensemble(path)
        want = build_psk(4, 2.0)
        np.testing.assert_allclose(loaded.states, want.states, atol=1e-15)
        np.testing.assert_allclose(loaded.priors, want.priors, atol=0)

    def test_bad_prior_sum_names_priors(self, tmp_path):
        payload = self.qpsk_payload()
        payload["priors"] = [0.2, 0.2, 0.2, 0.3]
        path = tmp_path / "bad.json"
        path.write_text(json.dumps(payload))
        with pytest.raises(ValueError, match="priors"):
            load_ensemble(path)

    def test_unnormalized_pure_vector_names_index(self, tmp_path):
        payload = {
            "kind": "pure",
            "priors": [0.5, 0.5],
            "states": [[[1.0, 0.0], [0.0, 0.0]], [[0.5, 0.0], [0.5, 0.0]]],
        }
        path = tmp_path / "pure.json"
        path.write_text(json.dumps(payload))
        with pytest.raises(ValueError, match="vector 1"):
            load_ensemble(path)

    def test_ragged_names_index(self, tmp_path):
        payload = self.qpsk_payload()
        payload["states"][2] = [[1.0, 0.0], [0.0, 1.0]]
        path = tmp_path / "ragged.json"
        path.write_text(json.dumps(payload))
        with pytest.raises(ValueError, match="2"):
            load_ensemble(path)

    def test_missing_key(self, tmp_path):
        path = tmp_path / "missing.json"
        path.write_text(json.dumps({"kind": "coherent", "priors": [0.5, 0.5]}))
        with pytest.raises(ValueError, match="states"):
            load_ensemble(path)

    def test_unknown_kind(self, tmp_path):
        payload = self.qpsk_payload()
        payload["kind"] = "mixed"
        path = tmp_path / "kind.json"
        path.write_text(json.dumps(payload))
        with pytest.raises(ValueError, match="kind"):
            load_ensemble(path)

    def test_parse_failure(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{not json")
        with pytest.raises(ValueError):
            load_ensemble(path)

    def test_pure_round_trip(self, tmp_path):
        payload = {
            "kind": "pure",
            "priors": [0.5, 0.5],
            "states": [[[1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [0.0, 1.0]]],
        }
        path = tmp_path / "pure.json"
        path.write_text(json.dumps(payload))
        loaded = load_ensemble(path)
        assert isinstance(loaded, PureStateEnsemble)
        np.testing.assert_allclose(loaded.vectors, [[1, 0], [0, 1j]], atol=0)
