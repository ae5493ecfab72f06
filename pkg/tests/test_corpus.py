import pytest

from sfk import classify, corpus, solve_a
from sfk.harmonic import NutParameter


def test_corpus_shape():
    entries = corpus.corpus()
    assert [e.name for e in entries] == ["quadrant", "O(-1)", "O(-2)", "O(-3)", "O(-4)",
                                         "A_2", "A_3", "A_4", "five-edge"]
    assert all(len(e.nuts) == 4 and e.nuts[0] is None for e in entries)


def test_nuts_are_interior():
    for e in corpus.corpus():
        for nu in e.nuts[1:]:
            first, last = NutParameter.of(nu).cone_dets(e.polygon)
            assert first > 0 and last > 0


@pytest.mark.parametrize("p", [2, 3, 4])
def test_a_series_round_trips_parameters(p):
    a = tuple(0.5 * i * (i + 1) for i in range(p))
    assert solve_a(corpus.a_series(p, a)) == pytest.approx(a)
    assert classify(corpus.a_series(p)).c1_zero


def test_five_edge_not_c1_zero():
    P = corpus.five_edge()
    assert P.offsets == (0.0, 0.0, 1.0, 4.0, 8.5)
    assert solve_a(P) == (0.0, 1.0, 2.0, 3.5)
    assert not classify(P).c1_zero
