import pytest

from bubbletree.bubble_trees import TreeError, enumerate_trees
from bubbletree.fm_config import enumerate_fm_strata, stratum_format
from bubbletree.notation import (
    ConfigExpr,
    NotationError,
    parse_config,
    parse_tree,
    print_config,
    print_tree,
)


def test_parse_tree_examples():
    t = parse_tree("[0[1,1]]")
    assert t.weight(0) == 0 and len(t.children(0)) == 2
    assert parse_tree("[3]").canonical() == "[3]"
    chain = parse_tree("[1[1[1]]]")
    assert chain.num_vertices() == 3 and chain.canonical() == "[1[1[1]]]"


def test_parse_whitespace_insensitive():
    assert parse_tree(" [ 1 [ 2 , 1 ] ] ") == parse_tree("[1[1,2]]")


def test_parse_accepts_reading_dot():
    assert parse_tree("[1[0·[1,1]]]") == parse_tree("[1[0[1,1]]]")


def test_parse_bar_tokens():
    for text in ("[0~[1,1]]", "[Kbar[1,1]]", "[0̄[1,1]]"):
        t = parse_tree(text)
        assert t.barred and t.weight(0) == 0
    assert print_tree(parse_tree("[0~[1,1]]")) == "[0~[1,1]]"
    # bar is display metadata only: canonical form is numeric
    assert parse_tree("[0~[1,1]]").canonical() == "[0[1,1]]"


def test_parse_marks():
    t = parse_tree("[1[★2,1]]")
    assert t.marks(0) == (2,)
    assert parse_tree("[1[*2,1]]") == t


def test_parse_error_positions():
    with pytest.raises(NotationError) as err:
        parse_tree("[1[1,]]")
    assert err.value.pos == 5
    with pytest.raises(NotationError):
        parse_tree("[1")
    with pytest.raises(NotationError):
        parse_tree("[1]]")


def test_parse_forwards_validation_errors():
    with pytest.raises(TreeError):
        parse_tree("[1[0[1]]]")  # ghost with a single child


def test_round_trip_all_trees_up_to_6():
    for K in range(1, 7):
        for t in enumerate_trees(K):
            assert parse_tree(print_tree(t)) == t


def test_printer_grammar_conformance():
    import re

    for t in enumerate_trees(4):
        s = print_tree(t)
        assert s.count("[") == s.count("]")
        assert re.fullmatch(r"[0-9\[\],~★]*", s)
        assert ",," not in s and "[," not in s and ",]" not in s


# -- configurations ------------------------------------------------------------

def test_parse_config_examples():
    items = parse_config("[x1[x2,x3[x4,x5]]]")
    assert len(items) == 1 and items[0].label == "x1"
    assert [c.label for c in items[0].children] == ["x2", "x3"]

    flat = parse_config("[x,y,z]")
    assert [c.label for c in flat] == ["x", "y", "z"]

    pt = parse_config("[p=(0,0,0,0)]")
    assert pt[0].coords == (0, 0, 0, 0)


def test_parse_config_mirror_labels_and_rationals():
    items = parse_config("[x[y[z,-z],w]]")
    inner = items[0].children[0]
    assert [c.label for c in inner.children] == ["z", "-z"]
    pt = parse_config("[p=(1/2,-3,0,2/7)]")
    from fractions import Fraction

    assert pt[0].coords == (Fraction(1, 2), -3, 0, Fraction(2, 7))


def test_config_round_trip():
    for text in ("[x1[x2,x3[x4,x5]]]", "[x,y,z]", "[p=(0,0,0,0)]", "[a[b,c],d]"):
        assert print_config(parse_config(text)) == text


def test_config_error_position():
    with pytest.raises(NotationError):
        parse_config("[x,]")
    with pytest.raises(NotationError):
        parse_config("[x=(1,2)]")  # coordinates must be 4-vectors


def test_stratum_formats_parse_and_match_nesting():
    for weights in [(1, 1), (1, 1, 1), (1, 2), (1, 1, 1, 1)]:
        for t in enumerate_fm_strata(weights):
            fmt = stratum_format(t)
            items = parse_config(fmt)
            rebuilt = ConfigExpr("root", children=items).nesting_tree()
            # the nesting tree of the format has the same shape as t with
            # unit leaf weights (formats carry no weights)
            def shape(tree, vid=0):
                kids = tree.children(vid)
                if not kids:
                    return ()
                return tuple(sorted(shape(tree, k) for k in kids))

            assert shape(rebuilt, rebuilt.children(0)[0]) == shape(t)
