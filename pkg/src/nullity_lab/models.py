"""Hopf model hypersurfaces: type (A) catalog plus abstract A xi = 0 data.

Closed forms are tabulated at c = 4 (CP^n) and c = -4 (CH^n).  Any other
c is reached by the homothety (c, A, r) -> (s^2 c, s A, r / s) with
s = sqrt(|c| / 4): the radius is rescaled by s before the table lookup
and every curvature is multiplied by s afterwards.
"""
from __future__ import annotations

import enum
import math
from collections import Counter
from dataclasses import dataclass

import numpy as np

from .errors import CatalogError, InconsistentCurvatureError
from .geometry import AmbientSpace, FramePoint, canonical_phi

SCHEMA = "nullity-lab/1"
HOPF_TOL = 1e-10


class Family(str, enum.Enum):
    CP_GeodesicSphere = "CP_GeodesicSphere"
    CP_TubeOverCPk = "CP_TubeOverCPk"
    CH_Horosphere = "CH_Horosphere"
    CH_GeodesicSphere = "CH_GeodesicSphere"
    CH_TubeOverCHn1 = "CH_TubeOverCHn1"
    CH_TubeOverCHk = "CH_TubeOverCHk"
    HopfAxiZero = "HopfAxiZero"

    @property
    def ambient_kind(self) -> str | None:
        if self.value.startswith("CP_"):
            return "cp"
        if self.value.startswith("CH_"):
            return "ch"
        return None

    @property
    def has_radius(self) -> bool:
        return self not in (Family.CH_Horosphere, Family.HopfAxiZero)

    @property
    def is_tube(self) -> bool:
        return self in (Family.CP_TubeOverCPk, Family.CH_TubeOverCHk)

    @property
    def is_type_a(self) -> bool:
        return self is not Family.HopfAxiZero


TYPE_A_FAMILIES = tuple(f for f in Family if f.is_type_a)


def homothety_factor(c: float) -> float:
    return math.sqrt(abs(c) / 4.0)


@dataclass(frozen=True)
class ModelSpec:
    """One catalog entry.

    ``axi_pairs`` is only used by ``HopfAxiZero``: one (lambda1, lambda2)
    pair per holomorphic block W_i, phiW_i, i.e. n - 1 pairs, each obeying
    lambda1 * lambda2 = c/4.
    """

    ambient: AmbientSpace
    family: Family
    r: float | None = None
    k: int | None = None
    axi_pairs: tuple[tuple[float, float], ...] | None = None

    def __post_init__(self):
        try:
            fam = Family(self.family)
        except ValueError:
            raise CatalogError(f"unknown family {self.family!r}") from None
        object.__setattr__(self, "family", fam)
        c, n = self.ambient.c, self.ambient.n
        if fam.ambient_kind == "cp" and c <= 0:
            raise CatalogError(f"{fam.value} needs c > 0, got c={c}")
        if fam.ambient_kind == "ch" and c >= 0:
            raise CatalogError(f"{fam.value} needs c < 0, got c={c}")

        if fam.has_radius:
            if self.r is None:
                raise CatalogError(f"{fam.value} needs a radius")
            r = float(self.r)
            rb = r * homothety_factor(c)
            if not math.isfinite(r) or r <= 0:
                raise CatalogError(f"radius must be positive, got r={self.r!r}")
            if fam.ambient_kind == "cp" and not rb < math.pi / 2:
                raise CatalogError(f"CP radius must satisfy 0 < r < pi/2 (rescaled), got r={r}")
            object.__setattr__(self, "r", r)
        elif self.r is not None:
            raise CatalogError(f"{fam.value} takes no radius")

        if fam.is_tube:
            if self.k is None or int(self.k) != self.k or not 1 <= self.k <= n - 2:
                raise CatalogError(f"{fam.value} needs 1 <= k <= n-2, got k={self.k!r} with n={n}")
            object.__setattr__(self, "k", int(self.k))
        elif self.k is not None:
            raise CatalogError(f"{fam.value} takes no k")

        if fam is Family.HopfAxiZero:
            pairs = self.axi_pairs
            if pairs is None:
                raise CatalogError("HopfAxiZero needs user-supplied curvature pairs")
            pairs = tuple((float(a), float(b)) for a, b in pairs)
            if len(pairs) != n - 1:
                raise CatalogError(f"HopfAxiZero needs n-1 = {n - 1} curvature pairs, got {len(pairs)}")
            for l1, l2 in pairs:
                if not _hopf_ok(0.0, l1, l2, c):
                    raise CatalogError(
                        f"pair ({l1}, {l2}) violates lambda1*lambda2 = c/4 with alpha = 0"
                    )
            object.__setattr__(self, "axi_pairs", pairs)
        elif self.axi_pairs is not None:
            raise CatalogError(f"{fam.value} takes no curvature pairs")


@dataclass(frozen=True)
class PrincipalCurvature:
    lam: float
    mult: int
    partner: int  # index of the phi-partner entry; equal to own index when phi-invariant


@dataclass(frozen=True)
class PrincipalData:
    ambient: AmbientSpace
    alpha: float
    curvatures: tuple[PrincipalCurvature, ...]

    def distinct_lambdas(self) -> tuple[float, ...]:
        return tuple(pc.lam for pc in self.curvatures)

    def phi_pairs(self):
        """Yield every phi-paired (lambda1, lambda2), each pair once."""
        for i, pc in enumerate(self.curvatures):
            if pc.partner >= i:
                yield pc.lam, self.curvatures[pc.partner].lam


def hopf_relation_residual(alpha: float, lambda1: float, lambda2: float, c: float) -> float:
    """|lambda1 lambda2 - alpha/2 (lambda1 + lambda2) - c/4|."""
    return abs(lambda1 * lambda2 - alpha / 2.0 * (lambda1 + lambda2) - c / 4.0)


def _hopf_ok(alpha, l1, l2, c, tol=HOPF_TOL) -> bool:
    # scale with the largest product so tiny radii (huge cot r) stay checkable
    scale = max(1.0, abs(l1 * l2), abs(alpha * l1), abs(alpha * l2))
    return hopf_relation_residual(alpha, l1, l2, c) <= tol * scale


def phi_partner_curvature(alpha: float, lambda1: float, c: float) -> float | None:
    """Principal curvature of phi W given A W = lambda1 W on a Hopf hypersurface.

    Returns None when lambda1 = alpha/2 and alpha^2 + c = 0 (horosphere branch,
    any partner is allowed).  Raises InconsistentCurvatureError when
    lambda1 = alpha/2 but lambda1 alpha/2 + c/4 != 0.
    """
    gap = lambda1 - alpha / 2.0
    rhs = lambda1 * alpha / 2.0 + c / 4.0
    scale = max(1.0, abs(lambda1), abs(alpha))
    if abs(gap) <= 1e-12 * scale:
        if abs(rhs) <= 1e-12 * scale * scale:
            return None
        raise InconsistentCurvatureError(
            f"lambda1 = alpha/2 = {lambda1} but lambda1*alpha/2 + c/4 = {rhs} != 0"
        )
    return rhs / gap


def _cot(x):
    return math.cos(x) / math.sin(x)


def _coth(x):
    return 1.0 / math.tanh(x)


# (alpha, [(lambda, multiplicity, kappa read off the (W, xi) pair)]) at c = +-4
def _table(family: Family, rb: float | None, n: int, k: int | None):
    if family is Family.CP_GeodesicSphere:
        return 2 * _cot(2 * rb), [(_cot(rb), 2 * n - 2, _cot(rb) ** 2)]
    if family is Family.CP_TubeOverCPk:
        return 2 * _cot(2 * rb), [
            (_cot(rb), 2 * (n - k - 1), _cot(rb) ** 2),
            (-math.tan(rb), 2 * k, math.tan(rb) ** 2),
        ]
    if family is Family.CH_Horosphere:
        return 2.0, [(1.0, 2 * n - 2, 1.0)]
    if family is Family.CH_GeodesicSphere:
        return 2 * _coth(2 * rb), [(_coth(rb), 2 * n - 2, _coth(rb) ** 2)]
    if family is Family.CH_TubeOverCHn1:
        return 2 * _coth(2 * rb), [(math.tanh(rb), 2 * n - 2, math.tanh(rb) ** 2)]
    if family is Family.CH_TubeOverCHk:
        return 2 * _coth(2 * rb), [
            (_coth(rb), 2 * (n - k - 1), _coth(rb) ** 2),
            (math.tanh(rb), 2 * k, math.tanh(rb) ** 2),
        ]
    raise CatalogError(f"no closed form for {family}")


def _axi_zero_entries(pairs):
    counts = Counter(tuple(sorted(p, reverse=True)) for p in pairs)
    raw = []  # (lam, mult, partner_lam)
    for (l1, l2), cnt in counts.items():
        if l1 == l2:
            raw.append((l1, 2 * cnt, l1))
        else:
            raw.append((l1, cnt, l2))
            raw.append((l2, cnt, l1))
    merged: dict[float, list] = {}
    for lam, mult, plam in raw:
        if lam in merged:
            merged[lam][0] += mult
        else:
            merged[lam] = [mult, plam]
    lams = sorted(merged, reverse=True)
    index = {lam: i for i, lam in enumerate(lams)}
    return tuple(
        PrincipalCurvature(lam, merged[lam][0], index[merged[lam][1]]) for lam in lams
    )


def principal_data(spec: ModelSpec) -> PrincipalData:
    """Closed-form principal curvatures, gate-checked before they are returned.

    Every phi-paired pair must satisfy the Hopf relation and, for type (A)
    families, c/4 + alpha*lambda must match the tabulated kappa value for
    that eigenvalue.  A failure raises CatalogError.
    """
    amb = spec.ambient
    c, n = amb.c, amb.n
    s = homothety_factor(c)
    if spec.family is Family.HopfAxiZero:
        data = PrincipalData(amb, 0.0, _axi_zero_entries(spec.axi_pairs))
        kappas = None
    else:
        rb = None if spec.r is None else spec.r * s
        alpha0, rows = _table(spec.family, rb, n, spec.k)
        rows = sorted((row for row in rows if row[1] > 0), key=lambda row: -row[0])
        data = PrincipalData(
            amb,
            s * alpha0,
            tuple(PrincipalCurvature(s * lam, mult, i) for i, (lam, mult, _) in enumerate(rows)),
        )
        kappas = [s * s * kap for _, _, kap in rows]
    _gate(data, kappas)
    return data


def _gate(data: PrincipalData, kappas):
    n = data.ambient.n
    total = sum(pc.mult for pc in data.curvatures)
    if total != 2 * n - 2:
        raise CatalogError(f"multiplicities sum to {total}, expected {2 * n - 2}")
    for l1, l2 in data.phi_pairs():
        if not _hopf_ok(data.alpha, l1, l2, data.ambient.c):
            raise CatalogError(
                f"catalog entry breaks the Hopf relation: alpha={data.alpha}, pair=({l1}, {l2})"
            )
    if kappas is not None:
        for pc, kap in zip(data.curvatures, kappas):
            got = data.ambient.c / 4.0 + data.alpha * pc.lam
            if abs(got - kap) > HOPF_TOL * max(1.0, abs(kap)):
                raise CatalogError(f"c/4 + alpha*lambda = {got} disagrees with tabulated kappa {kap}")


def holomorphic_blocks(data: PrincipalData) -> list[tuple[float, float]]:
    """(A W_i, A phiW_i) eigenvalues per canonical block, descending by first entry."""
    blocks = []
    for i, pc in enumerate(data.curvatures):
        if pc.partner == i:
            blocks.extend([(pc.lam, pc.lam)] * (pc.mult // 2))
        elif pc.partner > i:
            blocks.extend([(pc.lam, data.curvatures[pc.partner].lam)] * pc.mult)
    return blocks


def build_frame(spec: ModelSpec | PrincipalData) -> FramePoint:
    """Canonical frame with a diagonal shape operator, xi in the last slot."""
    data = spec if isinstance(spec, PrincipalData) else principal_data(spec)
    diag = [v for block in holomorphic_blocks(data) for v in block] + [data.alpha]
    n = data.ambient.n
    return FramePoint(data.ambient, canonical_phi(n), np.diag(diag), xi_index=2 * n - 2)


def closed_form_kappa(spec: ModelSpec) -> float | None:
    """Tabulated kappa for single-curvature families and A xi = 0; None otherwise."""
    c = spec.ambient.c
    if spec.family is Family.HopfAxiZero:
        return c / 4.0
    if spec.family.is_tube:
        return None
    s = homothety_factor(c)
    rb = None if spec.r is None else spec.r * s
    _, rows = _table(spec.family, rb, spec.ambient.n, spec.k)
    return s * s * rows[0][2]


def catalog_document(spec: ModelSpec) -> dict:
    data = principal_data(spec)
    return {
        "schema": SCHEMA,
        "ambient": {"c": spec.ambient.c, "n": spec.ambient.n},
        "family": spec.family.value,
        "r": spec.r,
        "k": spec.k,
        "alpha": data.alpha,
        "curvatures": [
            {"lambda": pc.lam, "mult": pc.mult, "pairs_with": pc.partner} for pc in data.curvatures
        ],
    }


def spec_from_document(doc: dict) -> ModelSpec:
    """Inverse of catalog_document; re-derives and re-checks the principal data."""
    if doc.get("schema") != SCHEMA:
        raise CatalogError(f"unsupported schema {doc.get('schema')!r}")
    amb = AmbientSpace(doc["ambient"]["c"], doc["ambient"]["n"])
    family = Family(doc["family"])
    pairs = None
    if family is Family.HopfAxiZero:
        curv = doc["curvatures"]
        pairs = []
        for i, entry in enumerate(curv):
            j = entry.get("pairs_with", i)
            if j == i:
                pairs.extend([(entry["lambda"], entry["lambda"])] * (entry["mult"] // 2))
            elif j > i:
                pairs.extend([(entry["lambda"], curv[j]["lambda"])] * entry["mult"])
    spec = ModelSpec(amb, family, r=doc.get("r"), k=doc.get("k"), axi_pairs=pairs)
    stored = doc.get("alpha")
    if stored is not None and abs(principal_data(spec).alpha - stored) > HOPF_TOL * max(1.0, abs(stored)):
        raise CatalogError("stored alpha disagrees with the catalog closed form")
    return spec
