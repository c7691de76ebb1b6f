import numpy as np
import pytest

from conftest import random_lasso
from ldgba_planner.automata import accepts_lasso, isomorphic, validate
from ldgba_planner.logic import AtomSet, eval_lasso, parse
from ldgba_planner.translate import TASKS, FragmentError, task_automaton, task_formula, translate, translate_text


@pytest.mark.parametrize("name", list(TASKS))
def test_registry_automata_are_valid(name):
    assert validate(task_automaton(name)) == []


@pytest.mark.parametrize("name", list(TASKS))
def test_registry_language_matches_formula(name):
    aut = task_automaton(name)
    f = task_formula(name)
    gen = np.random.default_rng(17)
    for _ in range(1000):
        w = random_lasso(gen, len(aut.atoms))
        assert accepts_lasso(aut, w) == eval_lasso(f, w, aut.atoms)


def test_phi1_shape():
    aut = task_automaton("grid_phi1")
    assert not aut.deterministic[aut.initial]
    assert len(aut.eps[aut.initial]) == 2
    assert len(aut.accepting) == 1
    assert len(aut.rejecting_sinks()) == 1
    assert sum(not d for d in aut.deterministic) == 1


def test_phi2_is_epsilon_free_with_two_phases():
    aut = translate(parse("G F (a & F b) & G !c"))
    assert all(aut.deterministic) and not any(aut.eps)
    assert len(aut.accepting) == 2


def test_safety_only():
    aut = translate_text("G !c", ["c"])
    assert aut.n_states == 2
    assert len(aut.accepting) == 1 and aut.accepting[0] == {aut.initial}


def test_go_to_goal_has_two_states():
    assert task_automaton("go_to_goal").n_states == 2


def test_office_and_warehouse_use_their_formulas():
    assert task_formula("office_task1") == parse("G F (Print & F (a | c)) & G !S")
    assert task_formula("warehouse_phi") == parse("G F (a & F b)")


@pytest.mark.parametrize("text", ["a U b U c", "X a", "F G a", "G (a U b)"])
def test_fragment_rejection_names_subformula(text):
    with pytest.raises(FragmentError) as exc:
        translate_text(text, ["a", "b", "c"])
    assert text in str(exc.value)


def test_unknown_task():
    with pytest.raises(KeyError):
        task_automaton("nope")


@pytest.mark.parametrize("name", list(TASKS))
def test_deterministic_construction(name):
    assert isomorphic(task_automaton(name), task_automaton(name))
    assert task_automaton(name) == task_automaton(name)


def test_extra_atoms_widen_the_alphabet():
    aut = translate(parse("F b"), AtomSet(["a", "b", "c"]))
    assert list(aut.atoms) == ["a", "b", "c"]
    gen = np.random.default_rng(0)
    f = parse("F b")
    for _ in range(200):
        w = random_lasso(gen, 3)
        assert accepts_lasso(aut, w) == eval_lasso(f, w, aut.atoms)
