import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from lindbladium.chain import ChainSpec, build_hamiltonian
from lindbladium.driving import DrivingCase, DrivingConfig, build_lindblad_set
from lindbladium.errors import CapacityError, DimensionError, ReductionError, SpecificationError
from lindbladium.liouvillian import assemble
from lindbladium.pauli import (
    OperatorSum, gamma_minus, gamma_plus, pauli, pi_minus, pi_plus, sigma, sigma_minus,
    sigma_plus, span_dimension,
)
from lindbladium.uniqueness import (
    algebra_closure, boundary_reduction, closure_generators, ladder_hamiltonian,
    null_space_dimension, reduce_boundary_generators, uniqueness_witnesses,
    verify_ladder_recursion,
)

from conftest import driving, matching_chain


def brute_force_closure(gens, n, rounds=12):
    """Span of all words, grown by multiplying a spanning set by the generators."""
    words = [g.to_vector() for g in gens]
    basis = np.array(words)
    for _ in range(rounds):
        new = []
        for w in words:
            W = OperatorSum.from_vector(w, n)
            for g in gens:
                new += [(g * W).to_vector(), (W * g).to_vector()]
        allv = np.vstack([basis, new])
        _, s, vh = np.linalg.svd(allv, full_matrices=False)
        rank = int(np.sum(s > 1e-9 * s[0]))
        if rank == basis.shape[0]:
            break
        basis = vh[:rank]
        words = list(basis)
    return basis.shape[0]


class TestClosure:
    def test_single_site_ladder(self):
        r = algebra_closure([sigma_plus(1, 1), sigma_minus(1, 1)])
        assert r.generated_dim == 4 and r.saturated

    def test_boundary_pair_plus_hamiltonian(self):
        h = build_hamiltonian(ChainSpec.xxz([1.0]))
        r = algebra_closure([sigma_plus(2, 1), sigma_minus(2, 1), h], 2)
        assert r.generated_dim == 16 and r.saturated

    def test_commuting_set(self):
        r = algebra_closure([sigma(2, 1, "Z")], 2)
        assert r.generated_dim == 2
        assert not r.saturated and r.complete

    @pytest.mark.parametrize("case", list(DrivingCase))
    def test_matches_brute_force(self, case):
        spec = matching_chain(case, 3)
        gens = closure_generators(build_hamiltonian(spec), build_lindblad_set(driving(case), 3))
        r = algebra_closure(gens, 3)
        assert r.generated_dim == brute_force_closure(gens, 3) == 64

    def test_history_monotone_and_bounded(self):
        spec = ChainSpec.graded_xxz(3)
        gens = closure_generators(build_hamiltonian(spec), build_lindblad_set(driving("XY_ORTHO"), 3))
        r = algebra_closure(gens, 3)
        assert all(a <= b for a, b in zip(r.history, r.history[1:]))
        assert r.history[-1] == r.generated_dim <= r.target_dim == 64
        assert r.history[0] == span_dimension(gens)

    def test_partial_when_rounds_exhausted(self):
        h = build_hamiltonian(ChainSpec.graded_xxz(3))
        r = algebra_closure([sigma_plus(3, 1), sigma_minus(3, 1), h], 3, max_rounds=1)
        assert not r.complete and not r.saturated and r.iterations == 1

    @given(st.integers(0, 2**32 - 1))
    def test_invariant_under_recombination(self, seed):
        rng = np.random.default_rng(seed)
        gens = [sigma_plus(2, 1), sigma(2, 2, "Z"), pauli(2, {1: "X", 2: "X"})]
        M = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
        mixed = [sum((g * M[i, k] for k, g in enumerate(gens)), OperatorSum.zero(2))
                 for i in range(3)]
        assert algebra_closure(mixed, 2).generated_dim == algebra_closure(gens, 2).generated_dim

    def test_errors(self):
        with pytest.raises(ValueError):
            algebra_closure([])
        with pytest.raises(DimensionError):
            algebra_closure([sigma(2, 1, "X"), sigma(3, 1, "X")])
        with pytest.raises(CapacityError):
            algebra_closure([sigma(7, 1, "X")])


class TestReduction:
    @pytest.mark.parametrize("plus,minus,family", [
        (pi_plus, pi_minus, "pi"),
        (gamma_plus, gamma_minus, "gamma"),
        (sigma_plus, sigma_minus, "sigma"),
    ])
    def test_families(self, plus, minus, family):
        ops = [2.5 * plus(3, 1), 0.4 * minus(3, 1)]
        red = boundary_reduction(ops)
        assert red.family == family and red.site == 1
        assert red.ops == [sigma_plus(3, 1), sigma_minus(3, 1)]

    def test_from_lindblad_set(self):
        ls = build_lindblad_set(DrivingConfig("Y_YZ_THETA", f=0.2, theta=0.3), 4)
        assert reduce_boundary_generators(ls) == [sigma_plus(4, 1), sigma_minus(4, 1)]

    def test_falls_through_to_other_boundary(self):
        ops = [sigma(3, 1, "X"), gamma_plus(3, 3), gamma_minus(3, 3)]
        red = boundary_reduction(ops)
        assert red.site == 3 and red.family == "gamma"

    def test_unrecognised(self):
        with pytest.raises(ReductionError):
            reduce_boundary_generators([sigma(2, 1, "X"), sigma(2, 2, "Z")])
        with pytest.raises(ReductionError):
            reduce_boundary_generators([pauli(2, {1: "X", 2: "X"})])
        with pytest.raises(ReductionError):
            reduce_boundary_generators([sigma_plus(2, 1)])
        with pytest.raises(ReductionError):
            reduce_boundary_generators([])


class TestLadder:
    def test_two_sites(self):
        v = verify_ladder_recursion(ChainSpec.xxz([0.7]))
        assert v["sigma+_2"] and v["sigma-_2"] and v["adjoint_identity"]

    def test_three_sites_second_step(self):
        v = verify_ladder_recursion(ChainSpec.xxz([0.5, 1.5]))
        assert v["sigma+_3"] and v["sigma-_3"]

    @pytest.mark.parametrize("n", [2, 3, 4, 5])
    @pytest.mark.parametrize("side", ["left", "right"])
    def test_all_identities(self, n, side):
        for spec in (ChainSpec.graded_xxz(n, alpha=1.7), ChainSpec.graded_xxx(n),
                     ChainSpec.xxz([1.0] * (n - 1))):
            v = verify_ladder_recursion(spec, side)
            assert len(v) == 4 + 2 * (n - 2)
            assert all(v.values()), v

    def test_heisenberg_point(self):
        # isotropic XXZ with Delta = alpha
        assert all(verify_ladder_recursion(ChainSpec.xxz([2.0, 2.0, 2.0], alpha=2.0)).values())

    def test_with_fields(self):
        spec = ChainSpec.xxz([0.5, 1.0, 1.5], fields_z=[0.2, -0.1, 0.3, 0.4])
        assert all(verify_ladder_recursion(spec).values())

    def test_ladder_normalisation(self):
        spec = ChainSpec.xxx([2.0, 4.0])
        h = ladder_hamiltonian(spec)
        assert h.coefficient("XXI") == 1 and h.coefficient("IYY") == 1
        assert h.coefficient("ZZI") == 1 and h.coefficient("IZZ") == 1

    def test_zero_hopping(self):
        with pytest.raises(SpecificationError):
            ladder_hamiltonian(ChainSpec.xxz([1.0], alpha=0.0))

    def test_bad_side(self):
        with pytest.raises(ValueError):
            verify_ladder_recursion(ChainSpec.xxz([1.0]), "middle")


class TestNullSpace:
    def test_driven_chain_unique(self):
        spec = ChainSpec.graded_xxz(3)
        sop = assemble(build_hamiltonian(spec), build_lindblad_set(driving("X_XY_THETA"), 3), 3)
        assert null_space_dimension(sop) == 1

    def test_unitary_dynamics_degenerate(self):
        sop = assemble(build_hamiltonian(ChainSpec.xxz([0.3])), [], 2)
        assert null_space_dimension(sop) >= 4

    def test_zero_bias_unique(self):
        spec = ChainSpec.graded_xxx(2)
        sop = assemble(build_hamiltonian(spec),
                       build_lindblad_set(driving("Z_XZ_THETA", f=0.0), 2), 2)
        assert null_space_dimension(sop) == 1

    def test_requires_dense(self):
        sop = assemble(build_hamiltonian(ChainSpec.xxz([0.3])), [], 2, "MATRIX_FREE")
        with pytest.raises(CapacityError):
            null_space_dimension(sop)


@pytest.mark.parametrize("case", list(DrivingCase))
@pytest.mark.parametrize("n", [2, 3])
def test_witnesses_agree(case, n):
    w = uniqueness_witnesses(matching_chain(case, n), driving(case))
    assert w.agree, w.to_dict()


def test_single_amplitude_completed_by_adjoint():
    cfg = DrivingConfig("XY_ORTHO", amp_l_plus=1.0)
    w = uniqueness_witnesses(ChainSpec.graded_xxz(3), cfg)
    assert w.reduction_site == 1 and w.reduction_family == "sigma"
    assert w.agree


def test_undriven_chain_not_unique():
    w = uniqueness_witnesses(ChainSpec.graded_xxz(3), DrivingConfig("XY_ORTHO"))
    assert w.reduction_site is None and not w.ladder_ok
    assert not w.closure.saturated
    assert w.null_dim > 1
    assert not w.to_dict()["agree"]
