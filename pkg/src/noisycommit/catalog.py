"""Reference channels used across the tests and the documentation."""

from fractions import Fraction

from .channel import BroadcastChannel, Dmc, MacChannel

_F = Fraction


def two_bidder_mac() -> MacChannel:
    """Binary two-user MAC whose output skews only when both inputs are 0.

    Rows are ordered (0,0), (0,1), (1,0), (1,1); the last three are pure
    coin flips, so the channel hides almost everything about the inputs.
    """
    return MacChannel([2, 2], None, fractions=[
        [_F(1, 4), _F(3, 4)],
        [_F(1, 2), _F(1, 2)],
        [_F(1, 2), _F(1, 2)],
        [_F(1, 2), _F(1, 2)],
    ])


def solo_channel(bidder) -> Dmc:
    """Channel a single active bidder sees when the other stays at 0."""
    if bidder not in (1, 2):
        raise ValueError("bidder must be 1 or 2")
    return Dmc(None, fractions=[[_F(1, 4), _F(3, 4)], [_F(1, 2), _F(1, 2)]])


def vertex_rows_channel() -> Dmc:
    """4x3 channel whose rows are polytope vertices.

    Every row keeps L1 distance >= 1/2 from mixtures of the others, yet
    (1/2, 0, 0, 1/2) and (0, 1/2, 1/2, 0) push forward to the same output
    law: non-redundant without the mixture map being injective.
    """
    return Dmc(None, fractions=[
        [_F(1), _F(0), _F(0)],
        [_F(1, 2), _F(1, 2), _F(0)],
        [_F(1, 2), _F(0), _F(1, 2)],
        [_F(0), _F(1, 2), _F(1, 2)],
    ])


def two_verifier_broadcast() -> BroadcastChannel:
    """Two independent copies of the solo channel, one per verifier."""
    w = solo_channel(1).fractions
    rows = []
    for x in range(2):
        rows.append([w[x][y1] * w[x][y2] for y1 in range(2) for y2 in range(2)])
    return BroadcastChannel([2, 2], None, fractions=rows)
