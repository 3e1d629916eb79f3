"""Linear synthetic realised measures.

Combines a T x D panel of realised measures into a single series via the
first principal component, the first independent component (fixed-point
FastICA) or the cross-sectional average.  PC/IC scores are rescaled onto the
global [min, max] range of the raw measure matrix so the result lives on the
same variance scale as its inputs.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DataError, NumericalError

FASTICA_TOL = 1e-6
FASTICA_MAX_ITER = 400


@dataclass(frozen=True)
class SyntheticSeries:
    values: np.ndarray
    method: str                        # one of PC, IC, AVG, AE
    orientation_flipped: bool
    source_range: tuple[float, float]  # global (min, max) of the source panel


@dataclass(frozen=True)
class PcaDecomposition:
    eigenvectors: np.ndarray   # D x D, columns ordered by descending eigenvalue
    eigenvalues: np.ndarray    # nonincreasing, nonnegative


@dataclass(frozen=True)
class IcaDecomposition:
    unmixing: np.ndarray       # D x D; centred scores = (X - mean) @ unmixing
    whitening_applied: bool
    column_means: np.ndarray


def _orient(scores: np.ndarray, X: np.ndarray) -> tuple[np.ndarray, bool]:
    """Flip sign so scores correlate positively with the per-row mean of X."""
    level = X.mean(axis=1)
    c = np.dot(scores - scores.mean(), level - level.mean())
    if c < 0:
        return -scores, True
    return scores, False


def pca_first(measures: np.ndarray) -> tuple[SyntheticSeries, PcaDecomposition]:
    """First-principal-component scores of the raw (uncentred) measure matrix.

    Eigenvectors come from the sample covariance of the columns; the scores
    are X @ u1 with the sign fixed so they track the panel's volatility level.
    """
    X = np.asarray(measures, dtype=float)
    if X.ndim != 2 or X.shape[0] < 2:
        raise DataError("pca_first needs a T x D matrix with T >= 2")
    if not np.all(np.isfinite(X)):
        raise DataError("pca_first: non-finite entries in measure matrix")
    C = np.cov(X, rowvar=False, ddof=1)
    C = np.atleast_2d(C)
    evals, evecs = np.linalg.eigh(C)
    order = np.argsort(evals)[::-1]
    evals = evals[order]
    evecs = evecs[:, order]
    scores = X @ evecs[:, 0]
    scores, flipped = _orient(scores, X)
    if flipped:
        evecs = evecs.copy()
        evecs[:, 0] = -evecs[:, 0]
    series = SyntheticSeries(values=scores, method="PC", orientation_flipped=flipped,
                             source_range=(float(X.min()), float(X.max())))
    return series, PcaDecomposition(eigenvectors=evecs, eigenvalues=evals)


def _whiten(X: np.ndarray, n_components: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Return (Z, K, mean) with Z = (X - mean) @ K.T having identity covariance.

    Only the n_components highest-variance principal directions are retained,
    so K is n x D and Z is T x n.
    """
    mean = X.mean(axis=0)
    Xc = X - mean
    C = np.cov(Xc, rowvar=False, ddof=1)
    C = np.atleast_2d(C)
    evals, evecs = np.linalg.eigh(C)
    order = np.argsort(evals)[::-1][:n_components]
    evals = evals[order]
    evecs = evecs[:, order]
    if np.any(evals <= 1e-14 * max(evals.max(), 1.0)):
        raise DataError("ica_first: zero-variance or collinear column, cannot whiten")
    K = (evecs / np.sqrt(evals)).T          # n x D
    return Xc @ K.T, K, mean


def ica_first(measures: np.ndarray, seed: int = 0,
              max_iter: int = FASTICA_MAX_ITER,
              n_components: int | None = None) -> tuple[SyntheticSeries, IcaDecomposition]:
    """First independent component via fixed-point FastICA.

    Log-cosh contrast, deflation scheme, whitening by eigen decomposition.
    With n_components=None all D components are extracted; otherwise
    whitening retains only that many principal directions before the
    fixed-point rotation, as in the usual reduced-rank FastICA.  Component
    order is arbitrary, so "first" is the component with maximal absolute
    correlation to the per-row mean of X, oriented positively.  Deterministic
    given the seed.
    """
    X = np.asarray(measures, dtype=float)
    T, D = X.shape
    if T <= D:
        raise DataError("ica_first needs T > D")
    n = D if n_components is None else int(n_components)
    if not 1 <= n <= D:
        raise DataError("ica_first: n_components must be in [1, D]")
    if D == 1:
        col = X[:, 0]
        sd = col.std(ddof=1)
        if sd == 0:
            raise DataError("ica_first: zero-variance column")
        z = (col - col.mean()) / sd
        series = SyntheticSeries(values=z, method="IC", orientation_flipped=False,
                                 source_range=(float(X.min()), float(X.max())))
        unmix = np.array([[1.0 / sd]])
        return series, IcaDecomposition(unmixing=unmix, whitening_applied=True,
                                        column_means=X.mean(axis=0))

    Z, K, mean = _whiten(X, n)
    rng = np.random.default_rng(seed)
    W = np.zeros((n, n))
    for i in range(n):
        w = rng.standard_normal(n)
        w /= np.linalg.norm(w)
        for _ in range(max_iter):
            wx = Z @ w
            g = np.tanh(wx)
            gp = 1.0 - g ** 2
            w_new = (Z * g[:, None]).mean(axis=0) - gp.mean() * w
            # deflation: orthogonalize against previously extracted rows
            w_new -= W[:i].T @ (W[:i] @ w_new)
            norm = np.linalg.norm(w_new)
            if norm < 1e-14:
                w_new = rng.standard_normal(D)
                w_new -= W[:i].T @ (W[:i] @ w_new)
                norm = np.linalg.norm(w_new)
            w_new /= norm
            if abs(abs(np.dot(w_new, w)) - 1.0) < FASTICA_TOL:
                w = w_new
                break
            w = w_new
        W[i] = w

    unmixing = K.T @ W.T                    # centred scores = (X - mean) @ unmixing
    S = (X - mean) @ unmixing
    level = X.mean(axis=1)
    level_c = level - level.mean()
    corrs = np.abs([np.corrcoef(S[:, i], level_c)[0, 1] for i in range(n)])
    pick = int(np.argmax(corrs))
    scores = X @ unmixing[:, pick]          # raw projection, shift absorbed by rescale
    scores, flipped = _orient(scores, X)
    series = SyntheticSeries(values=scores, method="IC", orientation_flipped=flipped,
                             source_range=(float(X.min()), float(X.max())))
    # move the picked column first so unmixing[:, 0] always yields the series
    order = [pick] + [i for i in range(n) if i != pick]
    unmixing = unmixing[:, order]
    if flipped:
        unmixing = unmixing.copy()
        unmixing[:, 0] = -unmixing[:, 0]
    return series, IcaDecomposition(unmixing=unmixing, whitening_applied=True,
                                    column_means=mean)


def avg_measure(measures: np.ndarray) -> SyntheticSeries:
    """Cross-sectional average of the D measures; already on the measure scale."""
    X = np.asarray(measures, dtype=float)
    return SyntheticSeries(values=X.mean(axis=1), method="AVG", orientation_flipped=False,
                           source_range=(float(X.min()), float(X.max())))


def range_match(series: np.ndarray, target_min: float, target_max: float) -> np.ndarray:
    """Affine map sending (min, max) of the series onto (target_min, target_max)."""
    s = np.asarray(series, dtype=float)
    smin, smax = float(s.min()), float(s.max())
    if smax <= smin:
        raise NumericalError("range_match: constant input series cannot be rescaled")
    if target_max <= target_min:
        raise NumericalError("range_match: target_max must exceed target_min")
    return (s - smin) / (smax - smin) * (target_max - target_min) + target_min


def synthetic_measure(measures: np.ndarray, method: str, seed: int = 0) -> SyntheticSeries:
    """One positive synthetic series on the panel's global [min, max] range.

    ``method``: "pc", "ic" or "avg".  The autoencoder route lives in
    ``volsynth.autoenc.train``.
    """
    X = np.asarray(measures, dtype=float)
    lo, hi = float(X.min()), float(X.max())
    m = method.lower()
    if m == "avg":
        return avg_measure(X)
    if m == "pc":
        raw, _ = pca_first(X)
    elif m == "ic":
        # Single-component extraction: the reduced-rank whitening keeps the
        # dominant-variance direction, so the resulting series matches the PC
        # series up to an affine map that the range match then removes.
        raw, _ = ica_first(X, seed=seed, n_components=1)
    else:
        raise DataError(f"unknown synthesis method '{method}'")
    values = range_match(raw.values, lo, hi)
    return SyntheticSeries(values=values, method=raw.method,
                           orientation_flipped=raw.orientation_flipped,
                           source_range=(lo, hi))
