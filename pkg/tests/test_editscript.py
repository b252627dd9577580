from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import levenshtein_distance
from redline.editscript import diff
from redline.ops import apply_op
from redline.tokens import tokenize

WORDS = st.sampled_from([f"w{i}" for i in range(20)])
SENTENCES = st.lists(WORDS, max_size=12).map(tuple)


def replay(sentence, script):
    for op in script:
        sentence = apply_op(sentence, op)
    return sentence


def test_identical_sentences_give_empty_script(table_original):
    assert diff(table_original, table_original) == ()


def test_single_substitution(table_original):
    target = tokenize("My husband and I love LA Hilton Hotel.")
    script = diff(table_original, target)
    assert len(script) == 1
    op = script[0]
    assert (op.kind, op.position, op.token) == ("substitute", 4, "love")


def test_subject_replacement_prefers_substitute_then_deletes(table_original):
    target = tokenize("Family enjoy LA Hilton Hotel.")
    script = diff(table_original, target)
    assert [op.kind for op in script] == ["substitute", "delete", "delete", "delete"]
    assert len(script) == levenshtein_distance(table_original, target) == 4
    assert replay(table_original, script) == target


def test_scripts_only_use_word_level_kinds(table_original):
    script = diff(table_original, tokenize("Family enjoy Hilton Hotel in LA."))
    assert all(op.kind in ("insert", "delete", "substitute") for op in script)
    assert all(op.source == "typed" for op in script)


@settings(max_examples=300)
@given(SENTENCES, SENTENCES)
def test_script_replays_and_is_minimal(a, b):
    script = diff(a, b)
    assert replay(a, script) == b
    assert len(script) == levenshtein_distance(a, b)


@given(SENTENCES, SENTENCES)
def test_distance_symmetry(a, b):
    assert len(diff(a, b)) == len(diff(b, a))


def test_deterministic_output():
    a = tuple("abcd")
    b = tuple("badc")
    assert diff(a, b) == diff(a, b)
    # frozen golden (oracle distance 3), fixed by the tie rule
    kinds = [(op.kind, op.position, op.token) for op in diff(a, b)]
    assert kinds == [
        ("delete", 0, None),
        ("substitute", 1, "a"),
        ("insert", 3, "c"),
    ]
    assert levenshtein_distance(a, b) == 3
