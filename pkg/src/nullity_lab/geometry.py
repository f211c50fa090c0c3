"""Orthonormal-frame model of a point on a real hypersurface in M_n(c).

The metric is the identity in the frame, so g is the dot product and
eta(X) is the xi-coordinate of X.  The structure tensor phi and the shape
operator A are stored as m x m matrices with m = 2n - 1.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ContractError

FRAME_TOL = 1e-12


@dataclass(frozen=True)
class AmbientSpace:
    """Non-flat complex space form: CP^n for c > 0, CH^n for c < 0."""

    c: float
    n: int

    def __post_init__(self):
        if not np.isfinite(self.c) or self.c == 0:
            raise ContractError(f"ambient must be non-flat, got c={self.c!r}")
        if int(self.n) != self.n or self.n < 2:
            raise ContractError(f"complex dimension must be an integer >= 2, got n={self.n!r}")
        object.__setattr__(self, "c", float(self.c))
        object.__setattr__(self, "n", int(self.n))

    @property
    def m(self) -> int:
        return 2 * self.n - 1

    @property
    def kind(self) -> str:
        return "cp" if self.c > 0 else "ch"


def canonical_phi(n: int) -> np.ndarray:
    """Structure tensor in the basis (W1, phiW1, ..., W_{n-1}, phiW_{n-1}, xi)."""
    m = 2 * n - 1
    phi = np.zeros((m, m))
    for b in range(n - 1):
        w, pw = 2 * b, 2 * b + 1
        phi[pw, w] = 1.0
        phi[w, pw] = -1.0
    return phi


def _frozen(a) -> np.ndarray:
    arr = np.array(a, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class FramePoint:
    """Snapshot of (phi, xi, eta, g, A) at one point, in an orthonormal frame.

    ``phi`` and ``shape`` are copied and made read-only.  All contact-structure
    invariants are checked on construction to ``FRAME_TOL``.
    """

    ambient: AmbientSpace
    phi: np.ndarray
    shape: np.ndarray
    xi_index: int = field(default=-1)

    def __post_init__(self):
        m = self.ambient.m
        phi = _frozen(self.phi)
        shape = _frozen(self.shape)
        if phi.shape != (m, m) or shape.shape != (m, m):
            raise ContractError(
                f"frame matrices must be {m}x{m} for n={self.ambient.n}, "
                f"got phi {phi.shape} and S {shape.shape}"
            )
        xi = self.xi_index % m if -m <= self.xi_index < m else None
        if xi is None:
            raise ContractError(f"xi_index {self.xi_index} out of range for m={m}")
        object.__setattr__(self, "phi", phi)
        object.__setattr__(self, "shape", shape)
        object.__setattr__(self, "xi_index", xi)
        problems = frame_violations(self)
        if problems:
            raise ContractError("invalid frame: " + "; ".join(problems))

    @property
    def m(self) -> int:
        return self.ambient.m

    @property
    def c(self) -> float:
        return self.ambient.c

    @property
    def xi(self) -> np.ndarray:
        e = np.zeros(self.m)
        e[self.xi_index] = 1.0
        return e

    def eta(self, X) -> float:
        return float(np.asarray(X, dtype=float)[self.xi_index])

    def basis(self, i: int) -> np.ndarray:
        e = np.zeros(self.m)
        e[i] = 1.0
        return e


def frame_violations(frame: FramePoint, tol: float = FRAME_TOL) -> list[str]:
    """List the FramePoint invariants that fail, empty when the frame is valid."""
    P, S, m = frame.phi, frame.shape, frame.m
    xi = np.zeros(m)
    xi[frame.xi_index] = 1.0
    out = []
    if not (np.all(np.isfinite(P)) and np.all(np.isfinite(S))):
        return ["non-finite entries"]
    if np.max(np.abs(S - S.T)) > tol:
        out.append("shape operator not symmetric")
    if np.max(np.abs(P + P.T)) > tol:
        out.append("phi not skew")
    if np.max(np.abs(P @ xi)) > tol:
        out.append("phi xi != 0")
    if np.max(np.abs(P @ P + np.eye(m) - np.outer(xi, xi))) > tol:
        out.append("phi^2 != -I + eta (x) xi")
    # g(phiX, phiY) = g(X, Y) - eta(X) eta(Y) on basis pairs
    if np.max(np.abs(P.T @ P - np.eye(m) + np.outer(xi, xi))) > tol:
        out.append("g(phiX, phiY) != g(X, Y) - eta(X)eta(Y)")
    return out


def _as_vectors(frame: FramePoint, *vs) -> list[np.ndarray]:
    out = []
    for v in vs:
        a = np.asarray(v, dtype=float)
        if a.shape != (frame.m,):
            raise ContractError(f"expected a vector of length {frame.m}, got shape {a.shape}")
        out.append(a)
    return out


def gauss_curvature(frame: FramePoint, X, Y, Z) -> np.ndarray:
    """R(X,Y)Z from the Gauss equation of a hypersurface in M_n(c).

    R(X,Y)Z = c/4 [g(Y,Z)X - g(X,Z)Y + g(phiY,Z)phiX - g(phiX,Z)phiY
                   - 2 g(phiX,Y) phiZ] + g(AY,Z)AX - g(AX,Z)AY
    """
    X, Y, Z = _as_vectors(frame, X, Y, Z)
    P, S = frame.phi, frame.shape
    q = frame.c / 4.0
    PX, PY, PZ = P @ X, P @ Y, P @ Z
    SX, SY = S @ X, S @ Y
    ambient = (Y @ Z) * X - (X @ Z) * Y + (PY @ Z) * PX - (PX @ Z) * PY - 2.0 * (PX @ Y) * PZ
    return q * ambient + (SY @ Z) * SX - (SX @ Z) * SY


def curvature_tensor(frame: FramePoint) -> np.ndarray:
    """All basis components at once: ``R[i, j, k] = R(e_i, e_j) e_k``."""
    m = frame.m
    P, S = frame.phi, frame.shape
    I = np.eye(m)
    # component l of each term; g(A e_j, e_k) = S[k, j], (A e_i)_l = S[l, i]
    ambient = (
        np.einsum("jk,li->ijkl", I, I)
        - np.einsum("ik,lj->ijkl", I, I)
        + np.einsum("kj,li->ijkl", P, P)
        - np.einsum("ki,lj->ijkl", P, P)
        - 2.0 * np.einsum("ji,lk->ijkl", P, P)
    )
    second = np.einsum("kj,li->ijkl", S, S) - np.einsum("ki,lj->ijkl", S, S)
    return frame.c / 4.0 * ambient + second


def curvature_on_xi(frame: FramePoint, X, Y) -> np.ndarray:
    """R(X,Y)xi, the quantity every nullity condition constrains."""
    return gauss_curvature(frame, X, Y, frame.xi)


def nabla_xi(frame: FramePoint, X) -> np.ndarray:
    """Covariant derivative of xi along X: phi A X."""
    (X,) = _as_vectors(frame, X)
    return frame.phi @ (frame.shape @ X)


def commutator_A_phi(frame: FramePoint) -> float:
    """Entrywise max of |A phi - phi A|; zero exactly for type (A) frames."""
    S, P = frame.shape, frame.phi
    return float(np.max(np.abs(S @ P - P @ S)))
