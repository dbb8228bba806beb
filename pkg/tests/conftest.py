import networkx as nx
import pytest
import sympy

from plkacr import fixtures


@pytest.fixture(scope="session")
def systems():
    return {name: fixtures.load(name) for name in fixtures.NETWORKS}


def sympy_rank(rows) -> int:
    rows = [list(r) for r in rows]
    if not rows or not rows[0]:
        return 0
    return sympy.Matrix(rows).rank()


def complex_graph(net) -> nx.DiGraph:
    g = nx.DiGraph()
    g.add_nodes_from(range(net.n))
    g.add_edges_from(net.arcs)
    return g


def oracle_summary(net):
    """(n, l, s, delta, t, weakly reversible) computed with sympy and networkx only."""
    g = complex_graph(net)
    l = nx.number_weakly_connected_components(g)
    sccs = list(nx.strongly_connected_components(g))
    cond = nx.condensation(g, sccs)
    t = sum(1 for v in cond.nodes if cond.out_degree(v) == 0)
    vecs = []
    for rx in net.reactions:
        y = net.complexes[rx.reactant].vector(net.species)
        yp = net.complexes[rx.product].vector(net.species)
        vecs.append([sympy.Rational(b.numerator, b.denominator) - sympy.Rational(a.numerator, a.denominator)
                     for a, b in zip(y, yp)])
    s = sympy.Matrix(vecs).rank()
    return net.n, l, s, net.n - l - s, t, len(sccs) == l


_criteria: dict[int, list[bool]] = {}


def pytest_runtest_logreport(report):
    name = report.nodeid.rsplit("::", 1)[-1]
    if report.when != "call" or not name.startswith("test_criterion_"):
        return
    num = int(name.split("_")[2])
    _criteria.setdefault(num, []).append(report.passed)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_criteria):
        ok = all(_criteria[num])
        terminalreporter.write_line(f"criterion {num:2d}: {'PASS' if ok else 'FAIL'}")
