"""The petal construction that embeds perfect necklaces into a larger alphabet."""
import itertools
import math

import pytest

from normweave.analysis import is_perfect, is_subsequence, sigma_gaps
from normweave.errors import NormweaveError
from normweave.liberal import (
    NecklacePair,
    build_distribution_graph,
    build_petals_tree,
    distribution_matching,
    liberal_insert,
    liberal_insert_stream,
    sections,
    theorem1_gap_bound,
)
from normweave.necklaces import cycle_from_word, eulerian_perfect_necklace
from normweave.words import Alphabet

BIN = Alphabet("01")
TRI = Alphabet("012")
FIXTURE = BIN.word("00011011")  # (2,2)-perfect


def word_edges(text: str, alphabet: Alphabet, n: int, k: int) -> set:
    """All (length-n label, tail residue) edges the circular word traverses."""
    L = len(text)
    edges = set()
    for i in range(L):
        label = "".join(text[(i + j) % L] for j in range(n))
        edges.add((label, i % k))
    return edges


class TestSections:
    def test_worked_example(self):
        cycle = cycle_from_word(FIXTURE, 2, 2)
        secs = sections(cycle)
        assert len(secs) == 4
        assert all(len(s.vertex_heads) == 2 for s in secs)
        as_sets = [set(s.vertex_heads) for s in secs]
        assert as_sets[0] == {(0, 0), (0, 1)}
        assert as_sets[1] == {(0, 0), (1, 1)}
        assert as_sets[2] == {(1, 0), (0, 1)}
        assert as_sets[3] == {(1, 0), (1, 1)}

    def test_total_heads_equal_edge_count(self):
        cycle = cycle_from_word(FIXTURE, 2, 2)
        assert sum(len(s.vertex_heads) for s in sections(cycle)) == 8


class TestDistributionGraph:
    def test_multiplicity_regular(self):
        cycle = cycle_from_word(FIXTURE, 2, 2)
        graph = build_distribution_graph(cycle)
        for v in graph.vertices:
            assert graph.multiplicity(v) == 2
        for heads in graph.section_heads:
            assert len(heads) == 2

    def test_matching_is_perfect(self):
        cycle = cycle_from_word(FIXTURE, 2, 2)
        match = distribution_matching(cycle)
        assert len(match) == 4
        assert len(set(match.values())) == 4
        adjacency = build_distribution_graph(cycle).adjacency()
        for j, v in match.items():
            assert v in adjacency[j]

    def test_worked_example_matching_admitted(self):
        cycle = cycle_from_word(FIXTURE, 2, 2)
        adjacency = build_distribution_graph(cycle).adjacency()
        example = {0: (0, 0), 1: (1, 1), 2: (0, 1), 3: (1, 0)}
        assert all(v in adjacency[j] for j, v in example.items())

    def test_matching_perfect_across_grid(self):
        for alpha in (BIN, TRI):
            for n in range(1, 4):
                for k in range(1, 4):
                    _, cycle = eulerian_perfect_necklace(alpha, n, k)
                    match = distribution_matching(cycle)
                    assert len(match) == len(set(match.values()))
                    assert len(match) == k * alpha.size ** (n - 1)


class TestNecklacePair:
    def test_sigma_sigma_orbit_merges_residues(self):
        # the all-sigma word of length 2 forms one class covering both residues
        hat = BIN.extend("s")
        a = NecklacePair(hat.size, 2, 2, 8, 0)  # "ss" = 2*3+2
        b = NecklacePair(hat.size, 2, 2, 8, 1)
        assert a.key() == b.key()
        assert a.orbit_len() == 2

    def test_one_sigma_classes_distinct_per_residue(self):
        hat = BIN.extend("s")
        a = NecklacePair(hat.size, 2, 2, 2, 0)  # "0s"
        b = NecklacePair(hat.size, 2, 2, 2, 1)
        assert a.key() != b.key()

    def test_members_are_rotation_consistent(self):
        hat = BIN.extend("s")
        pair = NecklacePair(hat.size, 3, 2, 2 * 9 + 3 * 2 + 0, 1)  # "2s0"-ish value
        members = pair.members()
        assert len(members) == pair.orbit_len()
        for w, m in members:
            assert NecklacePair(hat.size, 3, 2, w, m).key() == pair.key()


class TestPetalsTree:
    def test_worked_example_tree(self):
        hat = BIN.extend("s")
        tree = build_petals_tree(hat, 2, 2)
        # four one-sigma classes; the all-sigma words collapse to one class
        assert len(tree.levels[0]) == 4
        assert len(tree.levels[1]) == 1
        assert tree.size == 5
        roots = [c for c, p in tree.parent.items() if p is None]
        assert sorted(roots) == sorted(tree.levels[0])

    def test_every_sigma_class_covered(self):
        for alpha, n, k in ((BIN, 2, 2), (BIN, 3, 2), (BIN, 2, 3), (TRI, 2, 2)):
            hat = alpha.extend("s")
            bh = hat.size
            tree = build_petals_tree(hat, n, k)
            sig = bh - 1
            keys = set()
            total_edges = 0
            seen_orbits = set()
            for w in range(bh**n):
                digits = []
                x = w
                for _ in range(n):
                    x, d = divmod(x, bh)
                    digits.append(d)
                if sig not in digits:
                    continue
                for m in range(k):
                    pair = NecklacePair(bh, n, k, w, m)
                    key = pair.key()
                    keys.add(key)
                    if key not in seen_orbits:
                        seen_orbits.add(key)
                        total_edges += pair.orbit_len()
            assert set(tree.parent) == keys
            assert total_edges == k * (bh**n - alpha.size**n)

    def test_levels_count_sigmas(self):
        hat = BIN.extend("s")
        tree = build_petals_tree(hat, 3, 2)
        for depth, level in enumerate(tree.levels, start=1):
            for vmin, _ in level:
                digits = []
                x = vmin
                for _ in range(3):
                    x, d = divmod(x, 3)
                    digits.append(d)
                assert digits.count(2) == depth


class TestLiberalInsert:
    def test_worked_fixture_properties(self):
        res = liberal_insert(FIXTURE, "s", n=2, k=2)
        assert len(res.word) == 18
        assert is_perfect(res.word, 2, 2).ok
        assert res.subsequence_ok
        assert res.max_gap <= 4

    def test_every_petal_starts_with_sigma(self):
        res = liberal_insert(FIXTURE, "s", n=2, k=2)
        text = res.word.text
        for start, end in res.petal_spans:
            assert text[start] == "s"
            assert end > start

    def test_removing_petal_spans_recovers_input(self):
        for alpha, n, k in ((BIN, 2, 2), (BIN, 3, 3), (TRI, 2, 2)):
            neck, cycle = eulerian_perfect_necklace(alpha, n, k)
            res = liberal_insert(neck.word, "s", n=n, k=k, cycle=cycle, trusted=True)
            text = res.word.text
            drop = set()
            for start, end in res.petal_spans:
                drop.update(range(start, end))
            kept = "".join(ch for i, ch in enumerate(text) if i not in drop)
            assert kept == neck.word.text

    def test_exhausts_augmenting_edges(self):
        # output traverses every edge of the extended graph exactly once,
        # and the input edges are exactly the sigma-free ones
        for n, k in ((2, 2), (2, 3), (3, 2)):
            neck, cycle = eulerian_perfect_necklace(BIN, n, k)
            res = liberal_insert(neck.word, "s", n=n, k=k, cycle=cycle, trusted=True)
            hat = BIN.extend("s")
            got = word_edges(res.word.text, hat, n, k)
            assert len(got) == k * 3**n  # every edge exactly once
            sigma_free = {(lbl, m) for lbl, m in got if "s" not in lbl}
            assert sigma_free == word_edges(neck.word.text, BIN, n, k)

    def test_gap_bound_on_divisible_grid(self):
        for alpha in (BIN, TRI):
            for n in range(1, 4):
                for k in range(1, 4):
                    if n % k:
                        continue
                    neck, cycle = eulerian_perfect_necklace(alpha, n, k)
                    res = liberal_insert(
                        neck.word, "s", n=n, k=k, cycle=cycle, trusted=True
                    )
                    assert res.gap_bound_holds, (alpha.size, n, k, res.max_gap)

    def test_output_perfect_and_subsequence_everywhere(self):
        for alpha in (BIN, TRI):
            for n in range(1, 4):
                for k in range(1, 4):
                    neck, cycle = eulerian_perfect_necklace(alpha, n, k)
                    res = liberal_insert(
                        neck.word, "s", n=n, k=k, cycle=cycle, trusted=True
                    )
                    assert is_perfect(res.word, n, k).ok
                    assert res.subsequence_ok

    def test_rejects_imperfect_input(self):
        with pytest.raises(NormweaveError):
            liberal_insert(BIN.word("00011110"), "s", n=2, k=2)

    def test_rejects_sigma_in_alphabet(self):
        with pytest.raises(NormweaveError):
            liberal_insert(FIXTURE, "0", n=2, k=2)

    def test_degenerate_order_one(self):
        neck, cycle = eulerian_perfect_necklace(BIN, 1, 1)
        res = liberal_insert(neck.word, "s", n=1, k=1, cycle=cycle, trusted=True)
        assert len(res.word) == 3
        assert is_perfect(res.word, 1, 1).ok
        assert res.word.text.count("s") == 1


class TestLiberalStream:
    def test_block_lengths(self):
        prefix = "".join(itertools.islice(liberal_insert_stream(BIN, "s"), 21))
        # blocks of length n*3^n: 3, 18, ...
        assert is_perfect(BIN.extend("s").word(prefix[:3]), 1, 1).ok
        assert is_perfect(BIN.extend("s").word(prefix[3:21]), 2, 2).ok

    def test_blocks_embed_stream_blocks(self):
        from normweave.necklaces import perfect_stream

        hat_prefix = "".join(itertools.islice(liberal_insert_stream(BIN, "s"), 102))
        base_prefix = "".join(itertools.islice(perfect_stream(BIN), 34))
        hat_bounds = [0, 3, 21, 102]
        base_bounds = [0, 2, 10, 34]
        for i in range(3):
            block_hat = hat_prefix[hat_bounds[i] : hat_bounds[i + 1]]
            block = base_prefix[base_bounds[i] : base_bounds[i + 1]]
            ok, _ = is_subsequence(block, block_hat)
            assert ok

    def test_theorem1_bound_on_prefix(self):
        N = 20_000
        prefix = "".join(itertools.islice(liberal_insert_stream(BIN, "s"), N))
        positions = [i + 1 for i, ch in enumerate(prefix) if ch == "s"]
        for a, b in zip(positions, positions[1:]):
            gap = b - a - 1
            lowest = max(a, 3)
            if lowest >= b:
                continue
            assert gap <= theorem1_gap_bound(2, 3, lowest)

    def test_deterministic(self):
        a = "".join(itertools.islice(liberal_insert_stream(BIN, "s"), 500))
        b = "".join(itertools.islice(liberal_insert_stream(BIN, "s"), 500))
        assert a == b
