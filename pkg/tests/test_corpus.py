import json

import pytest

from torusnorms.corpus import CorpusSpec, generate_corpus, load_corpus, random_polynomial
from torusnorms.polynomial import PolynomialError, degree_profile, dump, univariate


def test_corpus_is_deterministic():
    spec = CorpusSpec(seed=42, n=2, max_total_degree=4, count=100)
    a, b = generate_corpus(spec), generate_corpus(spec)
    assert len(a.polynomials) == 100
    assert a.to_json() == b.to_json()


def test_prefix_property():
    short = generate_corpus(CorpusSpec(seed=3, n=2, max_total_degree=5, count=10))
    long = generate_corpus(CorpusSpec(seed=3, n=2, max_total_degree=5, count=30))
    assert [P.content_hash() for P in short.polynomials] == [P.content_hash() for P in long.polynomials[:10]]


def test_seeds_differ():
    a = generate_corpus(CorpusSpec(seed=1, n=2, max_total_degree=4, count=5))
    b = generate_corpus(CorpusSpec(seed=2, n=2, max_total_degree=4, count=5))
    assert a.to_json() != b.to_json()


@pytest.mark.parametrize("law", ["gaussian", "rademacher", "steinhaus"])
def test_no_zero_polynomials_and_degree_bound(law):
    corpus = generate_corpus(CorpusSpec(seed=5, n=3, max_total_degree=6, count=60, coefficient_law=law))
    for P in corpus.polynomials:
        assert P.terms
        assert degree_profile(P).total <= 6
        assert all(abs(c) > 0 for _, c in P.terms)


def test_homogeneous_kind():
    corpus = generate_corpus(CorpusSpec(seed=7, n=3, max_total_degree=5, count=40, kind="homogeneous"))
    assert all(degree_profile(P).homogeneous for P in corpus.polynomials)
    assert all(degree_profile(P).total >= 1 for P in corpus.polynomials)


def test_multiaffine_kind():
    corpus = generate_corpus(CorpusSpec(seed=8, n=4, max_total_degree=4, count=40, kind="multiaffine", degree=2))
    for P in corpus.polynomials:
        prof = degree_profile(P)
        assert prof.max_partial == 1 and prof.total == 2 and prof.homogeneous


def test_spec_validation():
    bad = [dict(n=0), dict(count=0), dict(max_total_degree=-1), dict(kind="odd"),
           dict(coefficient_law="cauchy"), dict(seed=-1), dict(degree=9),
           dict(kind="multiaffine", degree=3, n=2)]
    for kw in bad:
        base = dict(seed=1, n=3, max_total_degree=4, count=5)
        base.update(kw)
        with pytest.raises(ValueError):
            CorpusSpec(**base)
    with pytest.raises(PolynomialError):
        random_polynomial(CorpusSpec(seed=1, n=2, max_total_degree=4, count=1), kind="multiaffine", degree=3)


def test_manifest():
    spec = CorpusSpec(seed=9, n=2, max_total_degree=3, count=4)
    corpus = generate_corpus(spec)
    man = corpus.manifest()
    assert man["spec_hash"] == spec.hash()
    assert [it["index"] for it in man["items"]] == [0, 1, 2, 3]
    for it, P in zip(man["items"], corpus.polynomials):
        assert it["hash"] == P.content_hash()
        assert it["per_variable"] == list(degree_profile(P).per_variable)


def test_save_and_load(tmp_path):
    corpus = generate_corpus(CorpusSpec(seed=10, n=3, max_total_degree=3, count=6, kind="homogeneous"))
    path = tmp_path / "c.json"
    corpus.save(path)
    back = load_corpus(path)
    assert back.spec == corpus.spec
    assert [P.content_hash() for P in back.polynomials] == [P.content_hash() for P in corpus.polynomials]
    assert json.loads(path.read_text())["manifest"]["spec_hash"] == corpus.spec.hash()


def test_single_polynomial_file_is_a_corpus(tmp_path):
    path = tmp_path / "p.json"
    dump(univariate([1, 2, 3]), path)
    c = load_corpus(path)
    assert len(c.polynomials) == 1 and c.polynomials[0].n == 1


def test_load_errors(tmp_path):
    with pytest.raises(PolynomialError):
        load_corpus(tmp_path / "missing.json")
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(PolynomialError):
        load_corpus(bad)
