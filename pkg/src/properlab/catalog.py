"""Pseudo-Riemannian space forms X(p,q): admissibility predicates for
discontinuous groups, Radon-Hurwitz numbers and table audits."""

from __future__ import annotations

import json
from dataclasses import dataclass

from .cartan import MatrixGroupSpec
from .errors import ProperlabInputError

# q-patterns for the tangential space forms, p = 0..11 (q = 0 is admissible for every p)
PRINTED_TANGENTIAL = {
    0: "N",
    1: "2N",
    2: "2N",
    3: "4N",
    4: "8N",
    5: "8N",
    6: "8N",
    7: "8N",
    8: "16N",
    9: "32N",
    10: "64N",
    11: "64N",
}
TANGENTIAL_Q_MAX = 128


def _check_pq(p: int, q: int) -> None:
    if p < 0 or q < 0:
        raise ProperlabInputError("p and q must be nonnegative")


@dataclass(frozen=True)
class SpaceFormQuery:
    p: int
    q: int
    curvature: str = "positive"

    def __post_init__(self):
        _check_pq(self.p, self.q)
        if self.p + self.q < 1:
            raise ProperlabInputError("need p + q >= 1")
        if self.curvature not in ("positive", "negative"):
            raise ProperlabInputError(f"curvature must be positive or negative, got {self.curvature!r}")


def space_form_pair(p: int, q: int, curvature: str = "positive") -> tuple[MatrixGroupSpec, MatrixGroupSpec]:
    """(G, H) with X = G/H: O(p+1,q)/O(p,q) for positive curvature, O(p,q+1)/O(p,q) for negative."""
    SpaceFormQuery(p, q, curvature)
    H = MatrixGroupSpec("O", p=p, q=q)
    if curvature == "positive":
        return MatrixGroupSpec("O", p=p + 1, q=q), H
    return MatrixGroupSpec("O", p=p, q=q + 1), H


def cm_infinite(p: int, q: int) -> bool:
    """X(p,q) admits an infinite discontinuous group."""
    _check_pq(p, q)
    return p < q


def surface_group_admissible(p: int, q: int) -> bool:
    _check_pq(p, q)
    return p + 1 < q or (p + 1 == q and q % 2 == 0)


def compact_quotient_necessary(p: int, q: int) -> bool:
    """Known necessary condition for a cocompact discontinuous group on X(p,q)."""
    _check_pq(p, q)
    return p * q == 0 or (p < q and q % 2 == 0)


def conjecture_g4_member(p: int, q: int) -> bool:
    """Membership in the conjectured complete list of cocompact cases."""
    _check_pq(p, q)
    return q == 0 or p == 0 or (p == 1 and q % 2 == 0) or (p == 3 and q % 4 == 0) or (p, q) == (7, 8)


def radon_hurwitz(q: int) -> int:
    """rho(q) = 8a + 2^b where q = 2^(4a+b) * odd, 0 <= b <= 3."""
    if q < 1:
        raise ProperlabInputError("Radon-Hurwitz number needs q >= 1")
    v = (q & -q).bit_length() - 1
    a, b = divmod(v, 4)
    return 8 * a + 2**b


def tangential_admits_compact(p: int, q: int) -> bool:
    _check_pq(p, q)
    if q == 0:
        return True
    return p < radon_hurwitz(q)


@dataclass(frozen=True)
class AuditRow:
    cell: int | tuple[int, int]
    computed: str
    printed: str | None

    @property
    def match(self) -> bool:
        return self.computed == self.printed

    def to_json(self) -> dict:
        return {"cell": self.cell, "computed": self.computed, "printed": self.printed, "match": self.match}


def _pattern(qs: list[int], q_max: int) -> str:
    if not qs:
        return "none"
    g = qs[0]
    if qs != list(range(g, q_max + 1, g)):
        return "irregular:" + ",".join(map(str, qs))
    return "N" if g == 1 else f"{g}N"


def tangential_row(p: int, q_max: int = TANGENTIAL_Q_MAX) -> str:
    return _pattern([q for q in range(1, q_max + 1) if tangential_admits_compact(p, q)], q_max)


def tangential_table_audit(p_max: int, q_max: int = TANGENTIAL_Q_MAX) -> list[AuditRow]:
    """Compare ``{q <= q_max : p < rho(q)}`` with the printed row for p = 1..p_max."""
    if p_max < 1:
        raise ProperlabInputError("p_max must be >= 1")
    return [AuditRow(p, tangential_row(p, q_max), PRINTED_TANGENTIAL.get(p)) for p in range(1, p_max + 1)]


def audit_markdown(rows: list[AuditRow]) -> str:
    lines = ["| p | computed | printed | match |", "|---|---|---|---|"]
    for r in rows:
        lines.append(f"| {r.cell} | {r.computed} | {r.printed or '-'} | {'yes' if r.match else 'NO'} |")
    return "\n".join(lines) + "\n"


def audit_json(rows: list[AuditRow]) -> str:
    return json.dumps([r.to_json() for r in rows], sort_keys=True)


def space_form_report(p: int, q: int) -> dict:
    """Every predicate for X(p,q), plus the group pairs for both curvature signs."""
    _check_pq(p, q)
    G, H = space_form_pair(p, q, "positive")
    Gn, Hn = space_form_pair(p, q, "negative")
    return {
        "p": p,
        "q": q,
        "pair_positive": {"G": G.to_json(), "H": H.to_json()},
        "pair_negative": {"G": Gn.to_json(), "H": Hn.to_json()},
        "cm_infinite": cm_infinite(p, q),
        "surface_group_admissible": surface_group_admissible(p, q),
        "compact_quotient_necessary": compact_quotient_necessary(p, q),
        "conjecture_g4_member": conjecture_g4_member(p, q),
        "radon_hurwitz_q": radon_hurwitz(q) if q >= 1 else None,
        "tangential_admits_compact": tangential_admits_compact(p, q),
    }
