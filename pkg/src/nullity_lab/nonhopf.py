"""Pointwise replay of the non-Hopf arguments.

On the open set where beta != 0 a three dimensional hypersurface carries the
frame (U, phiU, xi) with

    AU = gamma U + delta phiU + beta xi,  A phiU = delta U + rho phiU,
    A xi = alpha xi + beta U,

and connection functions kappa1, kappa2, kappa3.  The Codazzi equation ties
the directional derivatives of these functions together; each nullity
hypothesis forces algebraic constraints which, after eliminating the
derivatives, leave a residual that vanishes only when c = 0 or beta = 0.

Nothing here integrates the structure equations.  Derivatives are plain
numbers (``DerivativeAssignment``) or are eliminated through the Codazzi
relations.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass, field, replace

import numpy as np

from .errors import StateError
from .geometry import AmbientSpace, FramePoint, canonical_phi, curvature_on_xi
from .nullity import NullityFamily

PRECONDITION_TOL = 1e-9


@dataclass(frozen=True)
class NonHopfState:
    c: float
    alpha: float
    beta: float
    gamma: float = 0.0
    delta: float = 0.0
    rho: float = 0.0
    k1: float = 0.0
    k2: float = 0.0
    k3: float = 0.0
    t: float = 0.0  # AU component along a unit Z orthogonal to U, phiU, xi (n >= 3 only)

    def __post_init__(self):
        if self.c == 0:
            raise StateError("c must be nonzero")
        if self.beta == 0:
            raise StateError("beta must be nonzero on the non-Hopf set")

    def to_dict(self) -> dict:
        return {k: float(v) for k, v in asdict(self).items()}


@dataclass(frozen=True)
class DerivativeAssignment:
    xi_delta: float = 0.0
    phiU_alpha: float = 0.0
    phiU_beta: float = 0.0
    U_delta: float = 0.0
    phiU_gamma: float = 0.0


def codazzi_rhs(s: NonHopfState) -> tuple[float, float, float, float]:
    """Right-hand sides of the four scalar Codazzi relations.

    In order: xi(delta), (phiU)(alpha), (phiU)(beta), U(delta) - (phiU)(gamma).
    """
    a, b, g, d, r = s.alpha, s.beta, s.gamma, s.delta, s.rho
    k1, k2, k3, c = s.k1, s.k2, s.k3, s.c
    xi_delta = a * g + b * k1 + d * d + r * k3 + c / 4 - g * r - g * k3 - b * b
    phiU_alpha = a * b + b * k3 - 3 * b * r
    phiU_beta = a * g + b * k1 + 2 * d * d + c / 2 - 2 * g * r + a * r
    mixed = r * k1 - k1 * g - b * g - 2 * d * k2 - 2 * b * r
    return xi_delta, phiU_alpha, phiU_beta, mixed


def codazzi_residuals(s: NonHopfState, d: DerivativeAssignment) -> tuple[float, float, float, float]:
    """(r6, r9, r10, r11): assignment minus Codazzi right-hand side, slot by slot."""
    xi_delta, phiU_alpha, phiU_beta, mixed = codazzi_rhs(s)
    return (
        d.xi_delta - xi_delta,
        d.phiU_alpha - phiU_alpha,
        d.phiU_beta - phiU_beta,
        (d.U_delta - d.phiU_gamma) - mixed,
    )


def consistent_assignment(s: NonHopfState, U_delta: float = 0.0) -> DerivativeAssignment:
    xi_delta, phiU_alpha, phiU_beta, mixed = codazzi_rhs(s)
    return DerivativeAssignment(xi_delta, phiU_alpha, phiU_beta, U_delta, U_delta - mixed)


def embed_frame(s: NonHopfState, n: int = 2) -> FramePoint:
    """Frame point with basis (U, phiU, Z, phiZ, ..., xi) carrying the state's A.

    Components of A not fixed by the state (the Z block beyond AU) are zero.
    """
    amb = AmbientSpace(s.c, n)
    if n == 2 and s.t != 0:
        raise StateError("t must vanish when n = 2")
    m = amb.m
    S = np.zeros((m, m))
    U, pU, xi = 0, 1, m - 1
    S[U, U] = s.gamma
    S[U, pU] = S[pU, U] = s.delta
    S[U, xi] = S[xi, U] = s.beta
    S[pU, pU] = s.rho
    S[xi, xi] = s.alpha
    if n >= 3:
        S[U, 2] = S[2, U] = s.t
    return FramePoint(amb, canonical_phi(n), S, xi_index=xi)


@dataclass(frozen=True)
class TraceStep:
    step: int
    constraint: str
    ref: str
    residual: float

    def to_dict(self) -> dict:
        return {"step": self.step, "constraint": self.constraint, "ref": self.ref, "residual": self.residual}


@dataclass(frozen=True)
class ForcingReport:
    family: NullityFamily
    state: NonHopfState  # after the forced assignments
    kappa: float
    mu: float
    nu: float
    obligations: dict[str, float]
    trace: tuple[TraceStep, ...]
    reduces_to_kappa: bool = False
    nu_branch_residual: float | None = None
    notes: tuple[str, ...] = field(default=())

    @property
    def forced(self) -> tuple[float, ...]:
        return (self.kappa, self.mu, self.nu)[: self.family.ncoef]

    def to_dict(self) -> dict:
        return {
            "family": self.family.value,
            "state": self.state.to_dict(),
            "forced": {"kappa": self.kappa, "mu": self.mu, "nu": self.nu},
            "obligations": dict(self.obligations),
            "reduces_to_kappa": self.reduces_to_kappa,
            "nu_branch_residual": self.nu_branch_residual,
            "notes": list(self.notes),
            "trace": [step.to_dict() for step in self.trace],
        }


def _R(frame, i, j):
    return curvature_on_xi(frame, frame.basis(i), frame.basis(j))


def _xi_pair_defect(frame, i, kappa, mu, nu):
    """R(e_i, xi)xi minus the nullity right-hand side for that pair (e_i in D)."""
    e = frame.basis(i)
    Se = frame.shape @ e
    return _R(frame, i, frame.xi_index) - kappa * e - mu * Se - nu * (frame.phi @ Se)


def force_kappa_nullity(s: NonHopfState) -> ForcingReport:
    """Consequences of R(X,Y)xi = kappa[eta(Y)X - eta(X)Y] at a non-Hopf point.

    Each step reads one component of the Gauss equation on the embedded
    frame; the recorded residual is that component's defect after the step's
    assignment.  Only the last step (alpha*gamma = beta^2) is an obligation
    and may be nonzero.
    """
    c = s.c
    U, pU = 0, 1
    f0 = embed_frame(s)
    xi = f0.xi_index
    trace = []

    # (U, xi): U-component gives kappa, phiU-component gives alpha*delta
    r_u = _R(f0, U, xi)
    kappa_from_U = float(r_u[U])
    s1 = replace(s, delta=0.0)
    f1 = embed_frame(s1)
    trace.append(TraceStep(
        1, "R(U,xi)xi: alpha*delta = 0 -> delta = 0; kappa = c/4 + alpha*gamma - beta^2",
        "Gauss equation at (U, xi)", abs(float(_R(f1, U, xi)[pU])),
    ))

    # (U, phiU): both brackets vanish, R(U,phiU)xi = -beta A phiU
    s2 = replace(s1, rho=0.0)
    f2 = embed_frame(s2)
    trace.append(TraceStep(
        2, "R(U,phiU)xi = -beta A phiU = 0 -> rho = 0 (also forces delta = 0 on its own)",
        "Gauss equation at (U, phiU)", float(np.max(np.abs(_R(f2, U, pU))))
    ))

    kappa = c / 4.0
    trace.append(TraceStep(
        3, "R(phiU,xi)xi = (c/4) phiU -> kappa = c/4 (uses delta = rho = 0 from steps 1-2)",
        "Gauss equation at (phiU, xi)", float(np.max(np.abs(_xi_pair_defect(f2, pU, kappa, 0.0, 0.0)))),
    ))

    obligation = abs(float(_R(f2, U, xi)[U]) - kappa)
    trace.append(TraceStep(
        4, "combine kappa readings: alpha*gamma - beta^2 = 0",
        "steps 1 and 3", obligation,
    ))
    return ForcingReport(
        family=NullityFamily.K,
        state=s2,
        kappa=kappa,
        mu=0.0,
        nu=0.0,
        obligations={"alpha*gamma - beta^2": obligation},
        trace=tuple(trace),
        notes=(f"kappa read from (U, xi) before forcing: {kappa_from_U!r}",),
    )


def _kappa_identity(alpha, beta, gamma, k1, c):
    """phiU(alpha*gamma - beta^2) with every derivative eliminated by Codazzi.

    Assumes delta = rho = 0 and U(delta) = xi(delta) = 0.  Substituting
    (phiU)alpha, (phiU)beta, (phiU)gamma and gamma*kappa3 from the Codazzi
    relations into gamma*(phiU)alpha + alpha*(phiU)gamma - 2*beta*(phiU)beta
    collapses to (beta + kappa1)(alpha*gamma - beta^2) - (3/4) beta c.  The
    factored form avoids the cancellation of the term-by-term sum and never
    divides by gamma.  Works on arrays.
    """
    return (beta + k1) * (alpha * gamma - beta * beta) - 0.75 * beta * c


def kappa_contradiction_residual(s: NonHopfState, tol: float = PRECONDITION_TOL) -> float:
    """|phiU(alpha*gamma - beta^2)| on the kappa-nullity locus; equals (3/4)|beta c|.

    Requires delta = rho = 0 and alpha*gamma = beta^2 (run force_kappa_nullity
    and project first).  A nonzero value means the locus is empty.
    """
    if abs(s.delta) > tol or abs(s.rho) > tol:
        raise StateError("precondition delta = rho = 0 not met")
    if abs(s.alpha * s.gamma - s.beta**2) > tol * max(1.0, s.beta**2):
        raise StateError("precondition alpha*gamma = beta^2 not met")
    return abs(float(_kappa_identity(s.alpha, s.beta, s.gamma, s.k1, s.c)))


def force_km_nullity(s: NonHopfState, with_nu: bool = False, n: int | None = None) -> ForcingReport:
    """Consequences of the (kappa, mu) or (kappa, mu, nu) condition at a non-Hopf point.

    Forced values are always (c/4, 0) or (c/4, 0, 0) and the condition
    collapses to the kappa one.  With ``with_nu`` the nu != 0 branch is
    replayed (gamma = 0) and its contradiction residual beta^2 recorded.
    """
    if n is None:
        n = 2 if s.t == 0 else 3
    c = s.c
    U, pU = 0, 1
    family = NullityFamily.KMN if with_nu else NullityFamily.KM
    trace = []

    s1 = replace(s, delta=0.0, rho=0.0)
    f1 = embed_frame(s1, n)
    xi = f1.xi_index
    trace.append(TraceStep(
        1, "R(U,phiU)xi = -beta A phiU = 0 -> A phiU = 0 (delta = rho = 0)",
        "Gauss equation at (U, phiU)", float(np.max(np.abs(_R(f1, U, pU)))),
    ))

    kappa = c / 4.0
    trace.append(TraceStep(
        2, "R(phiU,xi)xi = (c/4) phiU -> kappa = c/4",
        "Gauss equation at (phiU, xi)", float(np.max(np.abs(_xi_pair_defect(f1, pU, kappa, 0.0, 0.0)))),
    ))

    mu, nu = 0.0, 0.0
    T = _xi_pair_defect(f1, U, kappa, mu, nu)
    trace.append(TraceStep(
        3, "xi-component of the (U, xi) relation: mu*beta = 0 -> mu = 0",
        "Gauss equation at (U, xi), xi-component", abs(float(T[xi])),
    ))

    branch = None
    if with_nu:
        trace.append(TraceStep(
            4, "phiU-component: nu*gamma = 0",
            "Gauss equation at (U, xi), phiU-component", abs(float(T[pU])),
        ))
        # branch nu != 0 forces gamma = 0; the U-component then reads beta^2
        fb = embed_frame(replace(s1, gamma=0.0), n)
        branch = abs(float(_xi_pair_defect(fb, U, kappa, 0.0, 1.0)[U]))
        trace.append(TraceStep(
            5, "branch nu != 0: gamma = 0 and U-component reads beta^2 = 0, contradiction -> nu = 0",
            "Gauss equation at (U, xi), U-component", branch,
        ))

    u_obl = abs(float(T[U]))
    obligations = {"alpha*gamma - beta^2": u_obl}
    trace.append(TraceStep(
        len(trace) + 1, "U-component: alpha*gamma - beta^2 = 0",
        "Gauss equation at (U, xi), U-component", u_obl,
    ))
    if n >= 3:
        z_obl = abs(float(T[2]))
        obligations["alpha*t"] = z_obl
        trace.append(TraceStep(
            len(trace) + 1, "Z-component: (mu - alpha) t = 0 -> alpha*t = 0",
            "Gauss equation at (U, xi), Z-component", z_obl,
        ))
        if with_nu:
            trace.append(TraceStep(
                len(trace) + 1, "phiZ-component: nu*t = 0",
                "Gauss equation at (U, xi), phiZ-component", abs(float(T[3])),
            ))
    trace.append(TraceStep(
        len(trace) + 1, "relation reduces to R(X,Y)xi = kappa[eta(Y)X - eta(X)Y]",
        "kappa-nullity argument applies", 0.0,
    ))
    return ForcingReport(
        family=family,
        state=s1,
        kappa=kappa,
        mu=mu,
        nu=nu,
        obligations=obligations,
        trace=tuple(trace),
        reduces_to_kappa=True,
        nu_branch_residual=branch,
    )


@dataclass(frozen=True)
class Box:
    """Uniform sampling box: every field in [-half_width, half_width], |beta| >= beta_min."""

    half_width: float = 10.0
    beta_min: float = 1e-3

    def __post_init__(self):
        if not self.beta_min > 0:
            raise StateError(f"beta_min must be positive, got {self.beta_min}")
        if not self.half_width > self.beta_min:
            raise StateError("empty box: half_width must exceed beta_min")


def analytic_bound(c: float, family, box: Box) -> float:
    """Smallest terminal residual attainable inside the box."""
    family = NullityFamily(family)
    kbound = 0.75 * box.beta_min * abs(c)
    if family is NullityFamily.KMN:
        return min(kbound, box.beta_min**2)
    return kbound


@dataclass(frozen=True)
class SearchResult:
    c: float
    family: NullityFamily
    seed: int
    count: int
    box: Box
    min_residual: float
    bound: float
    argmin_index: int
    argmin: NonHopfState

    def to_dict(self) -> dict:
        return {
            "c": self.c,
            "family": self.family.value,
            "seed": self.seed,
            "count": self.count,
            "box": {"half_width": self.box.half_width, "beta_min": self.box.beta_min},
            "min_residual": self.min_residual,
            "bound": self.bound,
            "argmin_index": self.argmin_index,
            "argmin": self.argmin.to_dict(),
        }


def sample_states(c: float, seed: int, count: int, box: Box) -> dict[str, np.ndarray]:
    """Draw ``count`` raw states from numpy's PCG64 stream seeded with ``seed``.

    Columns are drawn in a fixed order so results only depend on (seed, count, box).
    """
    rng = np.random.default_rng(seed)
    w = box.half_width
    cols = {name: rng.uniform(-w, w, count) for name in ("alpha", "gamma", "k1", "k2", "k3")}
    mag = rng.uniform(box.beta_min, w, count)
    sign = np.where(rng.integers(0, 2, count) == 0, -1.0, 1.0)
    cols["beta"] = sign * mag
    return cols


def project_obligation(alpha, beta, gamma):
    """Move (alpha, gamma) onto alpha*gamma = beta^2, solving for the smaller of the two."""
    alpha = np.asarray(alpha, dtype=float)
    gamma = np.asarray(gamma, dtype=float)
    b2 = np.asarray(beta, dtype=float) ** 2
    both_zero = (alpha == 0) & (gamma == 0)
    alpha = np.where(both_zero, np.abs(beta), alpha)
    use_alpha = np.abs(alpha) >= np.abs(gamma)
    with np.errstate(divide="ignore", invalid="ignore"):
        new_gamma = np.where(use_alpha, b2 / alpha, gamma)
        new_alpha = np.where(use_alpha, alpha, b2 / gamma)
    return new_alpha, new_gamma


def terminal_residuals(c: float, family, cols: dict[str, np.ndarray]) -> tuple[np.ndarray, dict]:
    """Per-sample contradiction residual after forcing and projection.

    The forced values do not depend on the sample, so the forcing collapses
    to: delta = rho = 0, project onto alpha*gamma = beta^2, evaluate the
    eliminated identity.  For KMN the nu != 0 branch contributes beta^2 and
    a sample is only as infeasible as its least contradicted branch.
    """
    family = NullityFamily(family)
    alpha, gamma = project_obligation(cols["alpha"], cols["beta"], cols["gamma"])
    beta = cols["beta"]
    res = np.abs(_kappa_identity(alpha, beta, gamma, cols["k1"], c))
    if family is NullityFamily.KMN:
        res = np.minimum(res, beta * beta)
    projected = dict(cols, alpha=alpha, gamma=gamma)
    return res, projected


def feasibility_search(c: float, family, seed: int = 0, count: int = 100_000, box: Box | None = None) -> SearchResult:
    """Seeded uniform search for a non-Hopf state satisfying the forced constraints.

    Returns the smallest terminal residual found; a positive minimum above
    the analytic bound witnesses that the constrained set is empty.
    """
    if c == 0:
        raise StateError("c must be nonzero")
    if int(count) != count or count < 1:
        raise StateError(f"count must be a positive integer, got {count!r}")
    box = box or Box()
    family = NullityFamily(family)
    cols = sample_states(c, int(seed), int(count), box)
    res, proj = terminal_residuals(c, family, cols)
    i = int(np.argmin(res))  # first index on ties
    argmin = NonHopfState(
        c=float(c),
        alpha=float(proj["alpha"][i]),
        beta=float(proj["beta"][i]),
        gamma=float(proj["gamma"][i]),
        k1=float(proj["k1"][i]),
        k2=float(proj["k2"][i]),
        k3=float(proj["k3"][i]),
    )
    return SearchResult(
        c=float(c),
        family=family,
        seed=int(seed),
        count=int(count),
        box=box,
        min_residual=float(res[i]),
        bound=analytic_bound(c, family, box),
        argmin_index=i,
        argmin=argmin,
    )
