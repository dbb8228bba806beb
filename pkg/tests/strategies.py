"""Hypothesis strategies for small random reaction networks."""

from hypothesis import strategies as st

from plkacr.kinetics import KineticSystem
from plkacr.model import network_from_reactions

SPECIES = ("A", "B", "C", "D")


@st.composite
def networks(draw, max_species=4, max_reactions=7):
    m = draw(st.integers(1, max_species))
    species = SPECIES[:m]
    cplx = st.tuples(*[st.integers(0, 2) for _ in species])
    pairs = draw(
        st.lists(st.tuples(cplx, cplx).filter(lambda p: p[0] != p[1]), min_size=1, max_size=max_reactions)
    )
    rows = []
    for i, (a, b) in enumerate(pairs):
        rows.append((f"R{i + 1}", dict(zip(species, a)), dict(zip(species, b))))
    used = {sp for _, a, b in rows for sp in species if a[sp] or b[sp]}
    return network_from_reactions([sp for sp in species if sp in used], rows)


@st.composite
def kinetic_systems(draw, **kw):
    net = draw(networks(**kw))
    orders = st.sampled_from([0, 1, 2, "1/2", "-1"])
    F = [[draw(orders) for _ in net.species] for _ in range(net.r)]
    return KineticSystem(net, F)
