"""Hermitian eigensolver: cyclic Jacobi with phase-aligned plane rotations.

All verifier matrices are small (<= 64x64), where Jacobi is simple and
robust. Each rotation first aligns the phase of the off-diagonal pivot, then
applies the classical symmetric rotation; the accumulated transform stays
unitary, giving direct access to ``Q`` for reconstruction checks.
"""

from __future__ import annotations

import math

import numpy as np

from .matrix import ComplexMatrix

MAX_SWEEPS = 100
_OFFDIAG_TARGET = 1e-13


class NotHermitian(ValueError):
    pass


class NoConvergence(RuntimeError):
    pass


def _offdiag_norm(h: np.ndarray) -> float:
    mask = ~np.eye(h.shape[0], dtype=bool)
    return float(np.linalg.norm(h[mask]))


def hermitian_eig(
    m: ComplexMatrix, tol: float = 1e-10
) -> tuple[np.ndarray, np.ndarray]:
    """Eigen-decompose a Hermitian matrix; returns (ascending values, Q).

    Columns of ``Q`` are the corresponding eigenvectors, so
    ``M ~= Q @ diag(values) @ Q.conj().T``.
    """
    if not m.is_square:
        raise NotHermitian(f"matrix is {m.rows}x{m.cols}, not square")
    a = m.array
    hermitian_defect = float(np.linalg.norm(a - a.conj().T))
    if hermitian_defect > tol:
        raise NotHermitian(
            f"||M - M^dagger||_F = {hermitian_defect:.3e} exceeds tol {tol:.3e}"
        )

    n = m.rows
    h = ((a + a.conj().T) / 2.0).astype(np.complex128)
    q = np.eye(n, dtype=np.complex128)
    scale = float(np.linalg.norm(h))
    if n == 1 or scale == 0.0:
        values = h.real.diagonal().copy()
        order = np.argsort(values, kind="stable")
        return values[order], q[:, order]

    target = _OFFDIAG_TARGET * scale
    sweeps = 0
    while _offdiag_norm(h) > target:
        if sweeps >= MAX_SWEEPS:
            raise NoConvergence(
                f"off-diagonal norm {_offdiag_norm(h):.3e} above target "
                f"{target:.3e} after {MAX_SWEEPS} sweeps"
            )
        for p in range(n - 1):
            for qi in range(p + 1, n):
                pivot = h[p, qi]
                if abs(pivot) <= target / n:
                    continue
                app = h[p, p].real
                aqq = h[qi, qi].real
                phase = pivot / abs(pivot)
                # tan(2 theta) = 2|pivot| / (app - aqq), stable form
                tau = (aqq - app) / (2.0 * abs(pivot))
                if tau >= 0:
                    t = 1.0 / (tau + math.sqrt(1.0 + tau * tau))
                else:
                    t = -1.0 / (-tau + math.sqrt(1.0 + tau * tau))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = t * c
                rot = np.array(
                    [[c, s * phase], [-s * np.conj(phase), c]],
                    dtype=np.complex128,
                )
                h[:, [p, qi]] = h[:, [p, qi]] @ rot
                h[[p, qi], :] = rot.conj().T @ h[[p, qi], :]
                q[:, [p, qi]] = q[:, [p, qi]] @ rot
        # clamp numerical drift off the Hermitian manifold
        h = (h + h.conj().T) / 2.0
        sweeps += 1

    values = h.real.diagonal().copy()
    order = np.argsort(values, kind="stable")
    return values[order], q[:, order]


def hermitian_eigenvalues(m: ComplexMatrix, tol: float = 1e-10) -> list[float]:
    """Real eigenvalues of a Hermitian matrix, ascending."""
    values, _ = hermitian_eig(m, tol=tol)
    return [float(v) for v in values]
