import numpy as np
import pytest

from pdgc.lattice import (
    Atom,
    atom_precedes,
    build_lattice,
    classify_atom,
    coarse_grain,
    decompose,
    moebius_invert,
    spectral_redundancy,
)
from pdgc.series import Band, FrequencyGrid
from pdgc.spectral import SpectralFunction, integrate_band, spectral_gc
from pdgc.state_space import var_to_ss
from pdgc.var import estimate_var, simulate_var

from test_var import model_from, random_stable_model


def const_curve(c, n=64):
    return SpectralFunction(FrequencyGrid.uniform(n), np.full(n, float(c)))


class TestAtom:
    def test_antichain_enforced(self):
        with pytest.raises(ValueError, match="incomparable"):
            Atom.of({1}, {1, 2})

    def test_key_is_canonical(self):
        assert Atom.of({2, 1}, {3}).key() == "{1,2}{3}"
        assert Atom.of({3}, {1, 2}).key() == "{1,2}{3}"

    def test_empty_rejected(self):
        with pytest.raises(ValueError, match="at least one"):
            Atom(frozenset())
        with pytest.raises(ValueError, match="nonempty"):
            Atom.of(set())


class TestBuildLattice:
    def test_cardinalities(self):
        assert len(build_lattice(1)) == 1
        assert len(build_lattice(2)) == 4
        assert len(build_lattice(3)) == 18
        assert len(build_lattice(4)) == 166

    def test_n2_atoms_match_known_set(self):
        atoms = set(build_lattice(2).atoms)
        assert atoms == {
            Atom.of({1}, {2}),
            Atom.of({1}),
            Atom.of({2}),
            Atom.of({1, 2}),
        }

    def test_out_of_range(self):
        for n in (0, 5):
            with pytest.raises(ValueError, match="1..4"):
                build_lattice(n)

    def test_bottom_and_top(self):
        for n in (2, 3):
            lat = build_lattice(n)
            assert lat.bottom == Atom.of(*({i} for i in range(1, n + 1)))
            assert lat.top == Atom.of(set(range(1, n + 1)))

    def test_order_is_partial_order(self):
        # brute-force check of reflexivity, antisymmetry, transitivity
        for n in (2, 3):
            lat = build_lattice(n)
            m = len(lat)
            pre = lat.precedes_matrix
            assert pre.diagonal().all()
            for i in range(m):
                for j in range(m):
                    if i != j and pre[i, j]:
                        assert not pre[j, i]
                    assert pre[i, j] == atom_precedes(lat.atoms[i], lat.atoms[j])
                    for k in range(m):
                        if pre[i, j] and pre[j, k]:
                            assert pre[i, k]

    def test_topological(self):
        lat = build_lattice(3)
        pre = lat.precedes_matrix
        for i in range(len(lat)):
            for j in range(i + 1, len(lat)):
                assert not (pre[j, i] and i != j)

    def test_bivariate_gc_downset_for_n2(self):
        # the single-subset atom {1} sits above the bottom and below the top
        lat = build_lattice(2)
        i = lat.index_of(Atom.of({1}))
        below = {lat.atoms[k] for k in lat.strictly_below(i)}
        assert below == {Atom.of({1}, {2})}


class TestClassify:
    def test_n2_classes(self):
        assert classify_atom(Atom.of({1})) == ("unique", 1)
        assert classify_atom(Atom.of({2})) == ("unique", 2)
        assert classify_atom(Atom.of({1}, {2})) == ("redundant", None)
        assert classify_atom(Atom.of({1, 2})) == ("synergistic", None)

    def test_n3_class_counts(self):
        lat = build_lattice(3)
        kinds = [classify_atom(a)[0] for a in lat.atoms]
        assert kinds.count("unique") == 3
        assert kinds.count("redundant") == 4
        assert kinds.count("synergistic") == 11
        redundant = {a for a in lat.atoms if classify_atom(a)[0] == "redundant"}
        assert redundant == {
            Atom.of({1}, {2}, {3}),
            Atom.of({1}, {2}),
            Atom.of({1}, {3}),
            Atom.of({2}, {3}),
        }


class TestSpectralRedundancy:
    def test_single_collection_passthrough(self):
        curve = const_curve(0.4)
        out = spectral_redundancy(Atom.of({1}), {frozenset({1}): curve})
        np.testing.assert_array_equal(out.values, curve.values)

    def test_constant_min(self):
        curves = {frozenset({1}): const_curve(0.3), frozenset({2}): const_curve(0.5)}
        out = spectral_redundancy(Atom.of({1}, {2}), curves)
        np.testing.assert_allclose(out.values, 0.3)

    def test_identical_curves(self):
        rng = np.random.default_rng(0)
        grid = FrequencyGrid.uniform(64)
        curve = SpectralFunction(grid, rng.uniform(0, 1, 64))
        curves = {frozenset({1}): curve, frozenset({2}): curve}
        out = spectral_redundancy(Atom.of({1}, {2}), curves)
        np.testing.assert_array_equal(out.values, curve.values)

    def test_missing_curve(self):
        with pytest.raises(ValueError, match="missing"):
            spectral_redundancy(Atom.of({1}, {2}), {frozenset({1}): const_curve(1)})


def random_curves_n2(seed):
    rng = np.random.default_rng(seed)
    grid = FrequencyGrid.uniform(128)
    f1 = SpectralFunction(grid, rng.uniform(0, 1, 128))
    f2 = SpectralFunction(grid, rng.uniform(0, 1, 128))
    f12 = SpectralFunction(grid, np.maximum(f1.values, f2.values) + rng.uniform(0, 0.5, 128))
    return f1, f2, f12


class TestMoebius:
    def build_redundancies(self, lat, f1, f2, f12):
        curves = {
            frozenset({1}): f1,
            frozenset({2}): f2,
            frozenset({1, 2}): f12,
        }
        return {a: spectral_redundancy(a, curves) for a in lat.atoms}

    def test_bottom_passthrough(self):
        lat = build_lattice(2)
        f1, f2, f12 = random_curves_n2(1)
        red = self.build_redundancies(lat, f1, f2, f12)
        atoms = moebius_invert(lat, red)
        np.testing.assert_array_equal(
            atoms[lat.bottom].values, np.minimum(f1.values, f2.values)
        )

    def test_n2_hand_expansion(self):
        lat = build_lattice(2)
        f1, f2, f12 = random_curves_n2(2)
        atoms = moebius_invert(lat, self.build_redundancies(lat, f1, f2, f12))
        mn = np.minimum(f1.values, f2.values)
        np.testing.assert_allclose(atoms[Atom.of({1})].values, f1.values - mn, atol=1e-12)
        np.testing.assert_allclose(atoms[Atom.of({2})].values, f2.values - mn, atol=1e-12)
        np.testing.assert_allclose(
            atoms[Atom.of({1, 2})].values,
            f12.values - f1.values - f2.values + mn,
            atol=1e-12,
        )

    def test_inversion_round_trip(self):
        lat = build_lattice(3)
        rng = np.random.default_rng(3)
        grid = FrequencyGrid.uniform(64)
        curves = {}
        for r in (1, 2, 3):
            from itertools import combinations

            for combo in combinations((1, 2, 3), r):
                curves[frozenset(combo)] = SpectralFunction(
                    grid, rng.uniform(0.5, 2.0, 64) + r
                )
        red = {a: spectral_redundancy(a, curves) for a in lat.atoms}
        atoms = moebius_invert(lat, red)
        for i, atom in enumerate(lat.atoms):
            downset = list(lat.strictly_below(i)) + [i]
            total = sum(atoms[lat.atoms[j]].values for j in downset)
            np.testing.assert_allclose(total, red[atom].values, atol=1e-12)

    def test_missing_atom(self):
        lat = build_lattice(2)
        with pytest.raises(ValueError, match="missing redundancy"):
            moebius_invert(lat, {lat.bottom: const_curve(1, 128)})


class TestDecompose:
    def test_single_driver_degenerate(self):
        rng = np.random.default_rng(4)
        model = random_stable_model(rng, m=2, p=2, correlated=True)
        ss = var_to_ss(model)
        res = decompose(ss, target=1, drivers=(0,), grid=FrequencyGrid.uniform(128))
        np.testing.assert_allclose(res.coarse.unique[1].values, res.full.values, atol=1e-12)
        np.testing.assert_allclose(res.coarse.redundant.values, 0.0, atol=1e-12)
        np.testing.assert_allclose(res.coarse.synergistic.values, 0.0, atol=1e-12)

    def test_exact_decomposition_random_models(self):
        rng = np.random.default_rng(5)
        grid = FrequencyGrid.uniform(200)
        for trial in range(10):
            m = int(rng.integers(2, 6))
            model = random_stable_model(rng, m=m, p=int(rng.integers(1, 4)), correlated=True)
            ss = var_to_ss(model)
            target = int(rng.integers(m))
            drivers = tuple(i for i in range(m) if i != target)
            res = decompose(ss, target, drivers, grid)
            atom_sum = sum(c.values for c in res.atoms.values())
            np.testing.assert_allclose(atom_sum, res.full.values, atol=1e-10)
            coarse_sum = (
                sum(c.values for c in res.coarse.unique.values())
                + res.coarse.redundant.values
                + res.coarse.synergistic.values
            )
            np.testing.assert_allclose(coarse_sum, res.full.values, atol=1e-10)

    def test_n2_sign_structure(self):
        rng = np.random.default_rng(6)
        grid = FrequencyGrid.uniform(200)
        model = random_stable_model(rng, m=3, p=2, correlated=True)
        ss = var_to_ss(model)
        res = decompose(ss, target=2, drivers=(0, 1), grid=grid)
        assert res.coarse.unique[1].values.min() >= -1e-12
        assert res.coarse.unique[2].values.min() >= -1e-12
        assert res.coarse.redundant.values.min() >= -1e-12

    def test_n2_bivariate_identity_per_band(self):
        rng = np.random.default_rng(7)
        grid = FrequencyGrid.uniform(500)
        bands = (Band(0.03, 0.15, "lf"), Band(0.15, 0.4, "hf"))
        model = random_stable_model(rng, m=3, p=3, correlated=True)
        ss = var_to_ss(model)
        res = decompose(ss, target=0, drivers=(1, 2), grid=grid, bands=bands)
        for i, channel in ((1, 1), (2, 2)):
            pairwise = spectral_gc(ss, 0, (channel,), grid)
            for band in (None, *bands):
                lhs = integrate_band(pairwise, band).value
                rhs = (
                    integrate_band(res.coarse.unique[i], band).value
                    + integrate_band(res.coarse.redundant, band).value
                )
                assert abs(lhs - rhs) < 1e-10

    def test_near_duplicate_drivers_redundant(self):
        # ch1 replays ch0's past with 1% innovation noise; ch2 sees the same
        # information through either driver (lag-2 via ch0, lag-1 via ch1)
        coeffs = np.zeros((2, 3, 3))
        coeffs[0, 0, 0] = 0.9
        coeffs[1, 0, 0] = -0.5
        coeffs[0, 1, 0] = 1.0
        coeffs[1, 2, 0] = 0.4
        coeffs[0, 2, 1] = 0.4
        model = model_from(coeffs, sigma_u=np.diag([1.0, 0.01, 1.0]))
        ss = var_to_ss(model)
        res = decompose(ss, target=2, drivers=(0, 1), grid=FrequencyGrid.uniform(500))
        redundant = res.band_values["redundant"]["whole"]
        u1 = res.band_values[f"unique:{res.driver_label(1)}"]["whole"]
        u2 = res.band_values[f"unique:{res.driver_label(2)}"]["whole"]
        assert redundant >= 10 * max(u1, u2)

    def test_band_name_collision_rejected(self):
        rng = np.random.default_rng(8)
        model = random_stable_model(rng, m=2, p=1)
        ss = var_to_ss(model)
        with pytest.raises(ValueError, match="whole"):
            decompose(ss, 1, (0,), FrequencyGrid.uniform(64), bands=(Band(0.1, 0.2, "whole"),))

    def test_result_export_inventory(self):
        rng = np.random.default_rng(9)
        model = random_stable_model(rng, m=3, p=1, correlated=True)
        ss = var_to_ss(model)
        res = decompose(ss, 0, (1, 2), FrequencyGrid.uniform(64))
        names = [name for name, _ in res.spectra()]
        assert names[0] == "full"
        assert names[-2:] == ["redundant", "synergistic"]
        assert sum(1 for n in names if n.startswith("atom:")) == 4
        assert sum(1 for n in names if n.startswith("unique:")) == 2
        doc = res.to_dict()
        assert doc["target"] == "ch0"
        assert set(doc["band_values"]) == {n for n in doc["band_values"]}
        assert "significance" not in doc
