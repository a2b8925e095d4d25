"""Small SVD helpers with absolute thresholds."""
import numpy as np


def orth(vectors, atol=1e-9):
    """Orthonormal basis (columns) of the span of the columns of ``vectors``."""
    m = np.asarray(vectors)
    if m.size == 0:
        return np.zeros((m.shape[0] if m.ndim == 2 else 0, 0), dtype=m.dtype)
    u, s, _ = np.linalg.svd(m, full_matrices=False)
    return u[:, s > atol]


def null_space(m, atol=1e-9):
    """Orthonormal basis (columns) of the kernel of ``m``."""
    m = np.asarray(m)
    cols = m.shape[1]
    if m.shape[0] == 0:
        return np.eye(cols, dtype=m.dtype)
    _, s, vh = np.linalg.svd(m, full_matrices=True)
    rank = int((s > atol).sum())
    return vh[rank:].conj().T


def span_residual(basis, vec):
    """Distance from ``vec`` to the column span of an orthonormal ``basis``."""
    vec = np.asarray(vec).reshape(-1)
    if basis.shape[1] == 0:
        return float(np.linalg.norm(vec))
    return float(np.linalg.norm(vec - basis @ (basis.conj().T @ vec)))


def intersect(a, b, atol=1e-9):
    """Orthonormal basis of the intersection of two column spans (orthonormal inputs)."""
    if a.shape[1] == 0 or b.shape[1] == 0:
        return np.zeros((a.shape[0], 0), dtype=np.result_type(a, b))
    coeffs = null_space(np.hstack([a, -b]), atol)
    return orth(a @ coeffs[: a.shape[1]], atol)
