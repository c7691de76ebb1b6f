import numpy as np
import pytest
from hypothesis import given, settings

from conftest import ABC, lassos, random_lasso, simulate_accepts
from ldgba_planner.automata import Ldgba, accepts_lasso, isomorphic, split_accepting, validate
from ldgba_planner.logic import AtomSet, LassoWord
from ldgba_planner.translate import TASKS, task_automaton, translate_text

PHI1 = task_automaton("grid_phi1")


def sym(*names):
    return ABC.symbol(names)


def universal(atoms=AtomSet(["a"])):
    return Ldgba.build(atoms, 0, [True], [[{0}] * atoms.n_symbols], [set()], [{0}])


class TestValidate:
    def test_minimal_automaton_is_valid(self):
        assert validate(universal()) == []

    def test_eps_from_deterministic_state(self):
        atoms = AtomSet(["a"])
        aut = Ldgba.build(atoms, 0, [True, True], [[{0}, {0}], [{1}, {1}]], [{1}, set()], [{0}])
        problems = validate(aut)
        assert len(problems) == 1 and problems[0].startswith("eps from deterministic state q0")

    def test_phi1_structure(self):
        assert validate(PHI1) == []
        assert not PHI1.deterministic[PHI1.initial]
        assert PHI1.eps[PHI1.initial] == {1, 2}
        assert all(PHI1.deterministic[q] for q in range(1, PHI1.n_states))
        assert len(PHI1.accepting) == 1

    def test_deterministic_state_with_two_successors(self):
        atoms = AtomSet(["a"])
        aut = Ldgba.build(atoms, 0, [True, True], [[{0, 1}, {0}], [{1}, {1}]], [set(), set()], [{0}])
        assert any("2 successors" in p for p in validate(aut))

    def test_deterministic_state_leaving_q_d(self):
        atoms = AtomSet(["a"])
        aut = Ldgba.build(atoms, 0, [True, False], [[{1}, {0}], [{1}, {1}]], [set(), set()], [{0}])
        assert any("leaves Q_D" in p for p in validate(aut))

    def test_accepting_state_in_q_n_and_no_sets(self):
        atoms = AtomSet(["a"])
        aut = Ldgba.build(atoms, 0, [False], [[{0}, {0}]], [set()], [{0}])
        assert any("non-deterministic" in p for p in validate(aut))
        aut = Ldgba.build(atoms, 0, [True], [[{0}, {0}]], [set()], [])
        assert "no accepting sets" in validate(aut)

    @pytest.mark.parametrize("name", list(TASKS))
    def test_steps_on_q_d_are_total(self, name):
        aut = task_automaton(name)
        for q in range(aut.n_states):
            if aut.deterministic[q]:
                for s in range(aut.n_symbols):
                    assert isinstance(aut.step(q, s), int)


class TestStep:
    def test_phi1_component_loops(self):
        # the component reached by the first epsilon edge tracks 'a'
        q1 = 1
        after_a = PHI1.step(q1, sym("a"))
        assert after_a in PHI1.accepting[0]
        assert PHI1.step(after_a, sym("a")) == after_a

    def test_phi1_c_leads_to_trap(self):
        q3 = PHI1.step(1, sym("c"))
        assert q3 in PHI1.rejecting_sinks()
        assert all(PHI1.step(q3, s) == q3 for s in range(8))

    def test_universal(self):
        assert universal().step(0, 1) == 0

    def test_unknown_state(self):
        with pytest.raises(KeyError):
            PHI1.step(99, 0)

    def test_n_state_returns_set(self):
        assert PHI1.step(0, 0) == {0}


class TestAcceptsLasso:
    def test_phi1_examples(self):
        assert accepts_lasso(PHI1, LassoWord([], [sym("a")]))
        assert not accepts_lasso(PHI1, LassoWord([sym("c")], [0]))
        assert accepts_lasso(PHI1, LassoWord([0, 0], [sym("b"), 0]))
        assert not accepts_lasso(PHI1, LassoWord([], [0]))

    @pytest.mark.parametrize("name", list(TASKS))
    def test_matches_run_enumeration(self, name):
        aut = task_automaton(name)
        gen = np.random.default_rng(11)
        for _ in range(300):
            w = random_lasso(gen, len(aut.atoms))
            assert accepts_lasso(aut, w) == simulate_accepts(aut, w)

    @given(lassos())
    def test_rotation_invariance(self, w):
        for k in range(len(w.cycle)):
            rotated = LassoWord(w.prefix + w.cycle[:k], w.cycle[k:] + w.cycle[:k])
            assert accepts_lasso(PHI1, rotated) == accepts_lasso(PHI1, w)


class TestSplitAccepting:
    def test_phi2_copies_per_symbol(self):
        base = translate_text("G F (a & F b) & G !c", ["a", "b", "c"])
        split = task_automaton("grid_phi2")
        assert split.n_states > base.n_states
        assert validate(split) == []
        # every accepting copy is entered through edges of one split class only
        for f in split.accepting:
            for q in f:
                names = split.names[q]
                assert names.count("_") >= 1

    def test_noop_when_single_entry_symbol(self):
        aut = translate_text("G !c", ["c"])
        assert isomorphic(split_accepting(aut, [aut.atoms.symbol(["c"])]), aut)

    @pytest.mark.parametrize("name", ["grid_phi2", "office_task1", "warehouse_phi"])
    def test_language_preserved(self, name):
        split = task_automaton(name)
        f = TASKS[name].formula
        base = translate_text(f, list(split.atoms))
        gen = np.random.default_rng(5)
        for _ in range(500):
            w = random_lasso(gen, len(split.atoms))
            assert accepts_lasso(split, w) == accepts_lasso(base, w)


class TestIsomorphic:
    def test_relabel_is_isomorphic(self):
        order = [0, 2, 1, 5, 4, 3]
        assert isomorphic(PHI1.relabel(order), PHI1)
        assert PHI1.relabel(order) != PHI1

    def test_different_automata(self):
        assert not isomorphic(PHI1, task_automaton("go_to_goal"))

    @pytest.mark.parametrize("name", list(TASKS))
    def test_random_relabels(self, name):
        aut = task_automaton(name)
        gen = np.random.default_rng(2)
        for _ in range(5):
            order = [int(q) for q in gen.permutation(aut.n_states)]
            assert isomorphic(aut.relabel(order), aut)

    def test_changed_acceptance_breaks_isomorphism(self):
        other = Ldgba.build(PHI1.atoms, PHI1.initial, PHI1.deterministic, PHI1.delta, PHI1.eps, [{4}])
        assert not isomorphic(other, PHI1)
