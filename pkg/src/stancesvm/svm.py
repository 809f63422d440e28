"""Soft-margin binary SVM with a linear kernel, trained by SMO.

The trainer follows Platt's sequential minimal optimization: an outer loop
alternating full sweeps and sweeps over the non-bound multipliers, a
second-choice heuristic maximizing ``|E1 - E2|`` with fallback scans, and
an analytic two-variable update clipped to the box ``[0, C]``. Training is
fully deterministic.

Decision function: ``f(x) = w . x + b`` with ``w = sum_i alpha_i y_i x_i``.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Sequence, TextIO

import numpy as np
import scipy.sparse as sp

from .corpus import StanceLabel
from .features import SparseVector

MODEL_MAGIC = "stancesvm-model"
MODEL_VERSION = 1


class ConvergenceWarning(UserWarning):
    pass


class ModelFormatError(ValueError):
    pass


@dataclass(frozen=True)
class TrainConfig:
    c: float = 1.0
    kkt_tol: float = 1e-3
    alpha_eps: float = 1e-12
    max_passes: int = 10_000

    def __post_init__(self):
        if not (self.c > 0 and self.kkt_tol > 0 and self.alpha_eps > 0 and self.max_passes > 0):
            raise ValueError("C, kkt_tol, alpha_eps and max_passes must all be positive")
        if self.kkt_tol <= self.alpha_eps:
            raise ValueError("kkt_tol must exceed alpha_eps")


class LabeledExample(NamedTuple):
    x: SparseVector
    y: int  # +1 Favor, -1 Against

    @classmethod
    def from_label(cls, x: SparseVector, label: StanceLabel) -> "LabeledExample":
        return cls(x, label.sign)


class LinearKernel:
    name = "linear"

    def gram(self, X: sp.csr_matrix) -> np.ndarray:
        return np.asarray((X @ X.T).toarray(), dtype=float)


KERNELS = {"linear": LinearKernel()}


@dataclass
class SvmModel:
    alphas: np.ndarray
    bias: float
    weights: np.ndarray
    dimension: int
    c: float = 1.0
    converged: bool = True
    sweeps: int = 0
    kernel: str = "linear"
    info: dict[str, str] = field(default_factory=dict)

    @property
    def n_support(self) -> int:
        return int(np.count_nonzero(self.alphas))

    def decision_value(self, x: SparseVector) -> float:
        return decision_value(self, x)

    def predict(self, x: SparseVector) -> StanceLabel:
        return predict(self, x)


def to_csr(vectors: Sequence[SparseVector], dimension: int) -> sp.csr_matrix:
    indptr = [0]
    indices: list[int] = []
    data: list[float] = []
    for v in vectors:
        indices.extend(v.indices)
        data.extend(v.values)
        indptr.append(len(indices))
    return sp.csr_matrix((data, indices, indptr), shape=(len(vectors), dimension), dtype=float)


def dual_objective(data: Sequence[LabeledExample], alphas) -> float:
    """``sum(alpha) - 1/2 sum_ij alpha_i alpha_j y_i y_j <x_i, x_j>``; the bias does not enter."""
    dim = max((ex.x.max_index for ex in data), default=-1) + 1
    X = to_csr([ex.x for ex in data], dim)
    y = np.array([ex.y for ex in data], dtype=float)
    return _dual(LinearKernel().gram(X), y, np.asarray(alphas, dtype=float))


def _dual(K: np.ndarray, y: np.ndarray, alpha: np.ndarray) -> float:
    ay = alpha * y
    return float(alpha.sum() - 0.5 * ay @ K @ ay)


class _Smo:
    def __init__(self, K: np.ndarray, y: np.ndarray, cfg: TrainConfig, on_step=None):
        self.K = K
        self.y = y
        self.C = cfg.c
        self.tol = cfg.kkt_tol
        self.eps = cfg.alpha_eps
        self.n = len(y)
        self.alpha = np.zeros(self.n)
        self.b = 0.0
        self.E = -y.copy()  # f(x_i) - y_i with alpha = 0, b = 0
        self.on_step = on_step

    def non_bound(self) -> np.ndarray:
        a = self.alpha
        return np.flatnonzero((a > self.eps) & (a < self.C - self.eps))

    def take_step(self, i1: int, i2: int) -> bool:
        if i1 == i2:
            return False
        K, y, C = self.K, self.y, self.C
        a1, a2 = self.alpha[i1], self.alpha[i2]
        y1, y2 = y[i1], y[i2]
        E1, E2 = self.E[i1], self.E[i2]
        s = y1 * y2
        if s < 0:
            L, H = max(0.0, a2 - a1), min(C, C + a2 - a1)
        else:
            L, H = max(0.0, a1 + a2 - C), min(C, a1 + a2)
        if H - L <= self.eps:
            return False
        k11, k12, k22 = K[i1, i1], K[i1, i2], K[i2, i2]
        eta = k11 + k22 - 2.0 * k12
        slope = y2 * (E1 - E2)
        if eta > 0:
            a2_new = min(H, max(L, a2 + slope / eta))
        else:
            # objective is linear (or concave up) along the line; take the better end
            def gain(t):
                return t * slope - 0.5 * eta * t * t

            g_lo, g_hi = gain(L - a2), gain(H - a2)
            if g_lo > g_hi + self.eps:
                a2_new = L
            elif g_hi > g_lo + self.eps:
                a2_new = H
            else:
                return False
        if a2_new < self.eps:
            a2_new = 0.0
        elif a2_new > C - self.eps:
            a2_new = C
        if abs(a2_new - a2) < self.eps * (a2_new + a2 + self.eps):
            return False
        a1_new = min(C, max(0.0, a1 + s * (a2 - a2_new)))

        d1, d2 = y1 * (a1_new - a1), y2 * (a2_new - a2)
        b1 = self.b - E1 - d1 * k11 - d2 * k12
        b2 = self.b - E2 - d1 * k12 - d2 * k22
        if self.eps < a1_new < C - self.eps:
            b_new = b1
        elif self.eps < a2_new < C - self.eps:
            b_new = b2
        else:
            b_new = 0.5 * (b1 + b2)

        self.E += d1 * K[i1] + d2 * K[i2] + (b_new - self.b)
        self.alpha[i1], self.alpha[i2] = a1_new, a2_new
        self.b = b_new
        if self.on_step is not None:
            self.on_step(self.alpha, self.b)
        return True

    def examine(self, i2: int) -> int:
        y2, a2, E2 = self.y[i2], self.alpha[i2], self.E[i2]
        r2 = E2 * y2
        if not ((r2 < -self.tol and a2 < self.C - self.eps) or (r2 > self.tol and a2 > self.eps)):
            return 0
        nb = self.non_bound()
        if len(nb) > 1:
            i1 = int(nb[np.argmax(np.abs(self.E[nb] - E2))])
            if self.take_step(i1, i2):
                return 1
        for i1 in nb:
            if self.take_step(int(i1), i2):
                return 1
        for i1 in range(self.n):
            if self.take_step(i1, i2):
                return 1
        return 0

    def refresh(self) -> None:
        """Recompute the error cache exactly, with the bias that minimizes the
        largest KKT violation for the current multipliers."""
        g = self.K @ (self.alpha * self.y)
        y, a, eps, C = self.y, self.alpha, self.eps, self.C
        target = y - g  # b at which example i sits exactly on its margin
        free = (a > eps) & (a < C - eps)
        # b >= target for these, b <= target for the rest (free ones are both)
        lower = free | ((a <= eps) & (y > 0)) | ((a >= C - eps) & (y < 0))
        upper = free | ~lower
        lo = target[lower].max() if lower.any() else None
        hi = target[upper].min() if upper.any() else None
        if lo is not None and hi is not None:
            self.b = float(0.5 * (lo + hi))
        else:
            self.b = float(lo if lo is not None else hi)
        self.E = g + self.b - y

    def kkt_ok(self) -> bool:
        return kkt_violation(self.alpha, self.y * (self.E + self.y), self.C, self.eps) <= self.tol


def kkt_violation(alpha, margins, c: float, eps: float = 1e-12) -> float:
    """Largest KKT violation given margins ``y_i f(x_i)``."""
    alpha = np.asarray(alpha)
    m = np.asarray(margins) - 1.0
    at_zero = alpha <= eps
    at_c = alpha >= c - eps
    free = ~(at_zero | at_c)
    viol = np.zeros_like(m)
    viol[at_zero] = np.maximum(0.0, -m[at_zero])
    viol[at_c] = np.maximum(0.0, m[at_c])
    viol[free] = np.abs(m[free])
    return float(viol.max()) if len(viol) else 0.0


def train(
    data: Sequence[LabeledExample],
    cfg: TrainConfig | None = None,
    dimension: int | None = None,
    trace: TextIO | None = None,
    on_step: Callable[[np.ndarray, float], None] | None = None,
) -> SvmModel:
    """Train a linear soft-margin SVM.

    ``trace`` receives one ``sweep,changed_pairs,dual_objective`` line per
    sweep. ``on_step(alphas, bias)`` is called after every accepted pair
    update. If ``max_passes`` sweeps elapse first, a
    :class:`ConvergenceWarning` is issued and the model is flagged
    ``converged=False`` but otherwise usable.
    """
    cfg = cfg or TrainConfig()
    if not data:
        raise ValueError("no training examples")
    if any(ex.y not in (1, -1) for ex in data):
        raise ValueError("labels must be +1 or -1")
    if len({ex.y for ex in data}) < 2:
        raise ValueError("training data contains a single class")
    needed = max(ex.x.max_index for ex in data) + 1
    if dimension is None:
        dimension = needed
    elif needed > dimension:
        raise ValueError(f"feature index {needed - 1} exceeds dimension {dimension}")

    X = to_csr([ex.x for ex in data], dimension)
    y = np.array([ex.y for ex in data], dtype=float)
    K = KERNELS["linear"].gram(X)
    smo = _Smo(K, y, cfg, on_step)

    sweeps = 0
    examine_all = True
    converged = False
    while sweeps < cfg.max_passes:
        changed = 0
        candidates = range(smo.n) if examine_all else smo.non_bound()
        for i in candidates:
            changed += smo.examine(int(i))
        sweeps += 1
        if trace is not None:
            trace.write(f"{sweeps},{changed},{_dual(K, y, smo.alpha)!r}\n")
        if examine_all and changed == 0:
            # a clean full sweep: confirm on exact errors before stopping
            smo.refresh()
            if smo.kkt_ok():
                converged = True
                break
        elif examine_all:
            examine_all = False
        elif changed == 0:
            examine_all = True
    if not converged:
        smo.refresh()
        warnings.warn(f"SMO did not converge within {cfg.max_passes} sweeps", ConvergenceWarning, stacklevel=2)

    weights = np.asarray(X.T @ (smo.alpha * y)).ravel()
    return SvmModel(
        alphas=smo.alpha.copy(),
        bias=smo.b,
        weights=weights,
        dimension=dimension,
        c=cfg.c,
        converged=converged,
        sweeps=sweeps,
    )


def decision_value(m: SvmModel, x: SparseVector) -> float:
    """``w . x + b``; indices beyond the model dimension contribute nothing."""
    return x.dot(m.weights) + m.bias


def predict(m: SvmModel, x: SparseVector) -> StanceLabel:
    """Favor when the decision value is >= 0 (a tie at exactly 0 goes to Favor)."""
    return StanceLabel.FAVOR if decision_value(m, x) >= 0 else StanceLabel.AGAINST


# -- model files --------------------------------------------------------------


def format_model(m: SvmModel, include_alphas: bool = True) -> str:
    lines = [
        f"{MODEL_MAGIC} {MODEL_VERSION}",
        f"kernel {m.kernel}",
        f"dimension {m.dimension}",
        f"bias {m.bias!r}",
        f"c {m.c!r}",
        f"converged {'true' if m.converged else 'false'}",
        f"sweeps {m.sweeps}",
    ]
    for key, value in sorted(m.info.items()):
        lines.append(f"info {key} {value}")
    lines.append("weights")
    lines.extend(repr(float(w)) for w in m.weights)
    if include_alphas:
        lines.append(f"alphas {len(m.alphas)}")
        lines.extend(repr(float(a)) for a in m.alphas)
    return "\n".join(lines) + "\n"


def parse_model(source: str) -> SvmModel:
    lines = source.splitlines()
    expected = f"{MODEL_MAGIC} {MODEL_VERSION}"
    if not lines or lines[0].strip() != expected:
        found = lines[0][:40] if lines else ""
        raise ModelFormatError(f"bad model header {found!r}; expected {expected!r}")
    fields: dict[str, str] = {}
    info: dict[str, str] = {}
    pos = 1
    try:
        while lines[pos] != "weights":
            key, _, value = lines[pos].partition(" ")
            if key == "info":
                k, _, v = value.partition(" ")
                info[k] = v
            else:
                fields[key] = value
            pos += 1
        dimension = int(fields["dimension"])
        weights = np.array([float(v) for v in lines[pos + 1 : pos + 1 + dimension]])
        if len(weights) != dimension:
            raise ModelFormatError(f"expected {dimension} weights, found {len(weights)}")
        pos += 1 + dimension
        alphas = np.zeros(0)
        if pos < len(lines) and lines[pos].startswith("alphas"):
            count = int(lines[pos].split()[1])
            alphas = np.array([float(v) for v in lines[pos + 1 : pos + 1 + count]])
        if fields.get("kernel", "linear") not in KERNELS:
            raise ModelFormatError(f"unsupported kernel {fields['kernel']!r}")
        return SvmModel(
            alphas=alphas,
            bias=float(fields["bias"]),
            weights=weights,
            dimension=dimension,
            c=float(fields.get("c", "1.0")),
            converged=fields.get("converged", "true") == "true",
            sweeps=int(fields.get("sweeps", "0")),
            kernel=fields.get("kernel", "linear"),
            info=info,
        )
    except (IndexError, KeyError, ValueError) as exc:
        if isinstance(exc, ModelFormatError):
            raise
        raise ModelFormatError(f"malformed model file: {exc}") from None


def save_model(m: SvmModel, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_model(m))


def load_model(path) -> SvmModel:
    with open(path, encoding="utf-8") as fh:
        return parse_model(fh.read())
