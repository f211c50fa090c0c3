"""Pointwise nullity tests for the structure vector field xi.

A frame point satisfies the (kappa, mu, nu) condition when, for all X, Y,

    R(X,Y)xi = kappa [eta(Y)X - eta(X)Y] + mu [eta(Y)AX - eta(X)AY]
               + nu [eta(Y)phiAX - eta(X)phiAY]

with mu = nu = 0 for the kappa family and nu = 0 for the (kappa, mu) family.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .errors import NotKappaMemberError
from .geometry import FramePoint, curvature_on_xi, curvature_tensor
from .models import Family, ModelSpec, build_frame, principal_data

RANK_RTOL = 1e-10
CLASSIFY_TOL = 1e-10


class NullityFamily(str, enum.Enum):
    K = "K"
    KM = "KM"
    KMN = "KMN"

    @property
    def ncoef(self) -> int:
        return len(self.value)


@dataclass(frozen=True)
class NullityFit:
    family: NullityFamily
    kappa: float
    mu: float
    nu: float
    residual: float
    solution_dim: int
    nullspace_basis: tuple[tuple[float, float, float], ...] = field(default=())
    # Euclidean norm of the stacked defect, the quantity least squares minimizes;
    # unlike the max-norm residual it never increases from K to KM to KMN
    residual_l2: float = 0.0

    @property
    def coefficients(self) -> tuple[float, float, float]:
        return (self.kappa, self.mu, self.nu)

    def to_dict(self) -> dict:
        return {
            "family": self.family.value,
            "kappa": self.kappa,
            "mu": self.mu,
            "nu": self.nu,
            "residual": self.residual,
            "solution_dim": self.solution_dim,
            "nullspace_basis": [list(v) for v in self.nullspace_basis],
            "residual_l2": self.residual_l2,
        }


def _brackets(frame: FramePoint, X, Y):
    """The three bracket vectors [eta(Y)X - eta(X)Y] for X, Y, AX/AY, phiAX/phiAY."""
    S, P = frame.shape, frame.phi
    ex, ey = frame.eta(X), frame.eta(Y)
    SX, SY = S @ X, S @ Y
    return ey * X - ex * Y, ey * SX - ex * SY, ey * (P @ SX) - ex * (P @ SY)


def membership_residual(frame: FramePoint, family, kappa: float, mu: float = 0.0, nu: float = 0.0) -> float:
    """Max-norm defect of the nullity condition over all ordered basis pairs.

    Coefficients outside the family (mu for K, nu for K and KM) are ignored.
    """
    family = NullityFamily(family)
    if family is NullityFamily.K:
        mu = 0.0
    if family is not NullityFamily.KMN:
        nu = 0.0
    worst = 0.0
    m = frame.m
    for i in range(m):
        X = frame.basis(i)
        for j in range(m):
            Y = frame.basis(j)
            b_eta, b_a, b_phia = _brackets(frame, X, Y)
            defect = curvature_on_xi(frame, X, Y) - kappa * b_eta - mu * b_a - nu * b_phia
            worst = max(worst, float(np.max(np.abs(defect))))
    return worst


def design_system(frame: FramePoint, family) -> tuple[np.ndarray, np.ndarray]:
    """Stack R(e_i, e_j)xi against the bracket columns over ordered pairs i != j.

    Returns (M, b) with M of shape (m(m-1) * m, ncoef).
    """
    family = NullityFamily(family)
    m, xi = frame.m, frame.xi_index
    R = curvature_tensor(frame)[:, :, xi, :]
    S, P = frame.shape, frame.phi
    PS = P @ S
    I = np.eye(m)
    ii, jj = np.nonzero(~np.eye(m, dtype=bool))
    ej = (jj == xi).astype(float)[:, None]
    ei = (ii == xi).astype(float)[:, None]
    # column vectors of the basis / A / phiA images, one row per ordered pair
    cols = [
        ej * I[:, ii].T - ei * I[:, jj].T,
        ej * S[:, ii].T - ei * S[:, jj].T,
        ej * PS[:, ii].T - ei * PS[:, jj].T,
    ][: family.ncoef]
    M = np.stack([col.reshape(-1) for col in cols], axis=1)
    b = R[ii, jj, :].reshape(-1)
    return M, b


def _canonical_sign(v: np.ndarray) -> np.ndarray:
    k = int(np.argmax(np.abs(v)))
    return -v if v[k] < 0 else v


def fit_nullity(frame: FramePoint, family) -> NullityFit:
    """Least-squares (kappa, mu, nu) with the minimum-norm choice on rank deficiency.

    Singular values below RANK_RTOL * sigma_max count as zero; the number of
    those is reported as ``solution_dim`` together with a null-space basis.
    """
    family = NullityFamily(family)
    M, b = design_system(frame, family)
    U, s, Vt = np.linalg.svd(M, full_matrices=False)
    rank = int(np.sum(s > RANK_RTOL * s[0])) if s.size and s[0] > 0 else 0
    x = Vt[:rank].T @ ((U[:, :rank].T @ b) / s[:rank])
    coeffs = np.zeros(3)
    coeffs[: family.ncoef] = x
    null = []
    for v in Vt[rank:]:
        full = np.zeros(3)
        full[: family.ncoef] = _canonical_sign(v)
        null.append(tuple(float(t) for t in full))
    kappa, mu, nu = (float(t) for t in coeffs)
    return NullityFit(
        family=family,
        kappa=kappa,
        mu=mu,
        nu=nu,
        residual=membership_residual(frame, family, kappa, mu, nu),
        solution_dim=family.ncoef - rank,
        nullspace_basis=tuple(null),
        residual_l2=float(np.linalg.norm(M @ x - b)),
    )


@dataclass(frozen=True)
class ModelClassification:
    """Closed-form nullity membership of xi on a Hopf catalog model."""

    family: Family
    alpha: float
    c: float
    lambdas: tuple[float, ...]
    kappa_member: bool
    kappa: float | None
    km_point: tuple[float, float]
    km_direction: tuple[float, float] | None  # None: the (kappa, mu) solution is unique
    nu: float = 0.0

    def km_contains(self, kappa: float, mu: float, tol: float = CLASSIFY_TOL) -> bool:
        """Is (kappa, mu) on the closed-form solution set of the (kappa, mu) condition?"""
        dk, dm = kappa - self.km_point[0], mu - self.km_point[1]
        scale = max(1.0, abs(kappa), abs(mu))
        if self.km_direction is None:
            return max(abs(dk), abs(dm)) <= tol * scale
        # kappa + mu*lambda = c/4 + alpha*lambda for the single lambda
        lam = self.lambdas[0]
        return abs(dk + dm * lam) <= tol * scale * max(1.0, abs(lam))

    def to_dict(self) -> dict:
        return {
            "family": self.family.value,
            "alpha": self.alpha,
            "c": self.c,
            "lambdas": list(self.lambdas),
            "kappa_member": self.kappa_member,
            "kappa": self.kappa,
            "km_solution": "unique" if self.km_direction is None else "line",
            "km_point": list(self.km_point),
            "km_direction": None if self.km_direction is None else list(self.km_direction),
            "nu": self.nu,
        }


def classify_model(spec: ModelSpec) -> ModelClassification:
    """Membership of xi in N(kappa), N(kappa, mu), N(kappa, mu, nu) from closed forms.

    On a Hopf frame the (W, xi) pair reads kappa + mu*lambda = c/4 + alpha*lambda
    for each principal curvature lambda in D, and the phiW-component reads
    nu*lambda = 0.  So xi is in N(kappa) iff every c/4 + alpha*lambda agrees,
    (kappa, mu) = (c/4, alpha) always works and is unique once two distinct
    lambdas exist, and nu = 0 whenever some lambda is nonzero.
    """
    data = principal_data(spec)
    c, alpha = data.ambient.c, data.alpha
    lams = data.distinct_lambdas()
    kappas = [c / 4.0 + alpha * lam for lam in lams]
    spread = max(kappas) - min(kappas)
    member = spread <= CLASSIFY_TOL * max(1.0, max(abs(k) for k in kappas))
    kappa = None
    if member:
        kappa = c / 4.0 if abs(alpha) <= CLASSIFY_TOL else kappas[0]
    if len(lams) == 1:
        d = np.array([-lams[0], 1.0])
        direction = tuple(float(t) for t in _canonical_sign(d / np.linalg.norm(d)))
    else:
        direction = None
    return ModelClassification(
        family=spec.family,
        alpha=alpha,
        c=c,
        lambdas=lams,
        kappa_member=member,
        kappa=kappa,
        km_point=(c / 4.0, alpha),
        km_direction=direction,
    )


def kappa_of_model(spec: ModelSpec) -> float:
    """c/4 + alpha*lambda; c/4 when A xi = 0."""
    if spec.family is Family.HopfAxiZero:
        return spec.ambient.c / 4.0
    report = classify_model(spec)
    if not report.kappa_member:
        raise NotKappaMemberError(
            f"{spec.family.value} has distinct curvatures {report.lambdas} with alpha={report.alpha}"
        )
    return report.kappa


def fit_model(spec: ModelSpec, family) -> NullityFit:
    return fit_nullity(build_frame(spec), family)
