import os
from fractions import Fraction

import pytest
from hypothesis import strategies as st

from accurate_eval.poly import Polynomial, parse_polynomial

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
CORPUS = os.path.join(ROOT, "corpus")


def P(text, n=None):
    from accurate_eval.poly import max_variable_index

    return parse_polynomial(text, n or max(1, max_variable_index(text)))


def polys(n=3, max_exp=3, max_terms=5, coeffs=st.integers(-5, 5)):
    exps = st.tuples(*[st.integers(0, max_exp)] * n)
    return st.dictionaries(exps, coeffs, max_size=max_terms).map(lambda t: Polynomial(n, t))


def rationals(lo=-8, hi=8, den=8):
    return st.builds(Fraction, st.integers(lo * den, hi * den), st.integers(1, den))


def corpus_text(name):
    with open(os.path.join(CORPUS, name), encoding="utf-8") as fh:
        return fh.read()


@pytest.fixture
def corpus_dags():
    from accurate_eval.textio import read_dag

    return {f: read_dag(corpus_text(f)) for f in sorted(os.listdir(CORPUS)) if f.endswith(".dag")}


# acceptance lines, echoed in the terminal summary

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
