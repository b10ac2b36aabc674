import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pathagg.aggregation import solve
from pathagg.bounds import ceil_log2
from pathagg.generators import gen_binary_tree_lower_bound, gen_random_tree
from pathagg.heavy_path import (
    BaselineError,
    InTree,
    heavy_path_decomposition,
    is_tree_instance,
    solve_baseline,
    solve_tree_instance,
)
from pathagg.instance import build_instance
from pathagg.oracle import brute_force_opt
from pathagg.verification import check_arborescence, switching_costs


def _line_instance(n):
    """Line n-1 -> ... -> 1 -> 0, every non-root vertex a terminal with its own color."""
    arcs, paths = [], {}
    for v in range(1, n):
        paths[v] = []
        for x in range(v, 0, -1):
            paths[v].append(len(arcs))
            arcs.append((x, x - 1, f"c{v}"))
    return build_instance(n, 0, arcs, paths)


def test_lower_bound_instance_is_a_binary_tree():
    tree = is_tree_instance(gen_binary_tree_lower_bound(3))
    assert tree is not None
    assert tree.parent == (None,) + tuple((v - 1) // 2 for v in range(1, 15))


def test_branching_vertex_is_not_a_tree():
    inst = build_instance(3, 0, [(1, 0, "a"), (1, 2, "b"), (2, 0, "b")], {1: [0]})
    assert is_tree_instance(inst) is None


def test_crossing_pair_is_not_a_tree(crossing_pair):
    assert is_tree_instance(crossing_pair) is None


def test_line_of_four():
    tree = InTree(0, (None, 0, 1, 2))
    hpd = heavy_path_decomposition(tree)
    assert hpd.subtree == (4, 3, 2, 1)
    assert hpd.heavy == (False, True, True, False)
    assert sorted(hpd.paths) == [(2, 1), (3,)]
    assert hpd.crossings(tree, 3) == 2 <= ceil_log2(4)


@pytest.mark.parametrize("depth", [1, 2, 3, 4])
def test_complete_binary_tree_is_all_light(depth):
    tree = is_tree_instance(gen_binary_tree_lower_bound(depth))
    hpd = heavy_path_decomposition(tree)
    assert not any(hpd.heavy)
    assert len(hpd.paths) == tree.size - 1
    leaf = tree.size - 1
    assert hpd.crossings(tree, leaf) == depth <= ceil_log2(tree.size)
    assert hpd.max_crossings(tree) == depth


def test_single_vertex():
    hpd = heavy_path_decomposition(InTree(0, (None,)))
    assert hpd.paths == ()


def test_figure_one_style_tree_switches_once(figure1_tree):
    sol, hpd = solve_baseline(figure1_tree)
    assert check_arborescence(sol, figure1_tree).ok
    assert sol.max_switching <= 1
    assert switching_costs(sol, figure1_tree).costs == sol.switching
    # each vertex using the first arc of its own path switches three times from the deepest leaf
    naive = [figure1_tree.proposed_paths[v][0] for v in figure1_tree.terminals]
    assert switching_costs(naive, figure1_tree).max_cost == 3


def test_line_switches_once():
    inst = _line_instance(9)
    sol, hpd = solve_baseline(inst)
    assert len(hpd.paths) == 2
    assert sol.max_switching == 1 <= ceil_log2(9)


def test_complete_binary_depth_three_against_oracle():
    inst = gen_binary_tree_lower_bound(3)
    sol, _ = solve_baseline(inst)
    assert sol.max_switching <= ceil_log2(15) == 4
    assert sol.max_switching >= brute_force_opt(inst).optimum == 2


def test_missing_terminal_is_refused():
    # vertex 2 is the bottom of a heavy path but has no proposed path
    inst = build_instance(3, 0, [(1, 0, "a"), (2, 1, "b")], {1: [0]})
    with pytest.raises(BaselineError):
        solve_baseline(inst)


def test_non_tree_is_refused(crossing_pair):
    with pytest.raises(BaselineError, match="is_tree_instance"):
        solve_baseline(crossing_pair)


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 3000), st.integers(1, 4), st.integers(0, 2**64 - 1))
def test_random_trees_respect_crossing_bound(n, max_parallel, seed):
    inst = gen_random_tree(n, max_parallel, seed)
    tree = is_tree_instance(inst)
    assert tree is not None
    hpd = heavy_path_decomposition(tree)
    covered = sorted(v for path in hpd.paths for v in path)
    assert covered == [v for v in range(n) if v != tree.root]
    bound = ceil_log2(n)
    assert hpd.max_crossings(tree) <= bound
    sol = solve_tree_instance(inst, tree, hpd)
    assert check_arborescence(sol, inst).ok
    assert sol.max_switching <= bound
    main, _ = solve(inst)
    assert check_arborescence(main, inst).ok
