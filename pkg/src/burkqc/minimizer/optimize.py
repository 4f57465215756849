"""L-BFGS descent with backtracking, treating +inf energies as rejected steps."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from .energy import Energy
from .mesh import DiscreteMap


@dataclass
class StageResult:
    penalty_weight: float
    eps: float
    iterations: int
    status: str
    value: float
    grad_norm: float
    start: int = 0      # index of this stage's first entry in the history


@dataclass
class MinimizeResult:
    map: DiscreteMap
    value: float
    history: List[float]
    stages: List[StageResult] = field(default_factory=list)
    converged: bool = True
    unpenalized: float = float("nan")
    cone_violation: float = 0.0

    @property
    def status(self) -> str:
        return "CONVERGED" if self.converged else "NONCONVERGED"

    @property
    def iterations(self) -> int:
        return sum(s.iterations for s in self.stages)

    def monotone(self, rtol: float = 1e-12) -> bool:
        """History non-increasing within every stage (stages change the energy)."""
        h = np.asarray(self.history)
        bounds = [s.start for s in self.stages] + [len(h)]
        for a, b in zip(bounds, bounds[1:]):
            seg = h[a:b]
            if np.any(np.diff(seg) > rtol * np.maximum(1.0, np.abs(seg[1:]))):
                return False
        return True


def _pack(w):
    return np.concatenate([w.real, w.imag])


def _unpack(x):
    n = len(x) // 2
    return x[:n] + 1j * x[n:]


def lbfgs(fun, x0, max_iter=500, gtol=1e-8, memory=10, c1=1e-4, history=None, ftol=1e-11,
          window=10, fscale=None):
    """Minimize fun(x) -> (f, g) (f may be inf) from a finite starting point.

    Stops on max|g| <= gtol, or when the decrease over the last `window`
    iterations is below ftol * fscale (default fscale = max(1, |f|)).
    """
    x = x0.copy()
    f, g = fun(x)
    if not np.isfinite(f):
        raise ValueError("initial point has infinite energy")
    S, Y = [], []
    status = "MAXITER"
    recent = [f]
    it = 0
    for it in range(1, max_iter + 1):
        gn = float(np.max(np.abs(g)))
        if gn <= gtol:
            status = "GTOL"
            it -= 1
            break
        # two-loop recursion
        q = g.copy()
        al = []
        for s, y in reversed(list(zip(S, Y))):
            rho = 1.0 / np.dot(y, s)
            a = rho * np.dot(s, q)
            al.append(a)
            q -= a * y
        if S:
            gamma = np.dot(S[-1], Y[-1]) / np.dot(Y[-1], Y[-1])
        else:
            gamma = 1e-2 / max(gn, 1e-300)
        r = gamma * q
        for (s, y), a in zip(zip(S, Y), reversed(al)):
            rho = 1.0 / np.dot(y, s)
            b = rho * np.dot(y, r)
            r += s * (a - b)
        d = -r
        slope = float(np.dot(g, d))
        if not slope < 0:
            S, Y = [], []
            d = -g * (1e-2 / gn)
            slope = float(np.dot(g, d))
        step = 1.0
        accepted = False
        for _ in range(60):
            xn = x + step * d
            fn, gnew = fun(xn)
            if np.isfinite(fn) and fn <= f + c1 * step * slope:
                accepted = True
                break
            step *= 0.5
        if not accepted:
            status = "LINESEARCH"
            break
        s, y = xn - x, gnew - g
        if np.dot(s, y) > 1e-300:
            S.append(s)
            Y.append(y)
            if len(S) > memory:
                S.pop(0)
                Y.pop(0)
        x, f, g = xn, fn, gnew
        if history is not None:
            history.append(f)
        recent.append(f)
        if len(recent) > window and recent[-window - 1] - f <= ftol * (max(1.0, abs(f)) if fscale is None else fscale):
            status = "FTOL"
            break
    return x, f, g, it, status


def minimize(energy: Energy, init: DiscreteMap, max_iter: Optional[int] = None,
             gtol: Optional[float] = None) -> MinimizeResult:
    """Descent on interior nodal values with penalty continuation.

    Stages first lower the norm smoothing along cfg.eps_schedule at the
    smallest penalty weight, then sweep the penalty weights at cfg.eps.
    Earlier stages only warm-start the next one, so convergence is judged
    on the last stage. Stagnation is measured per unit mesh area.
    """
    cfg = energy.cfg
    if not np.allclose(init.values[energy.mesh.boundary], energy.trace, rtol=0, atol=1e-12):
        raise ValueError("initial map does not match the boundary trace")
    max_iter = cfg.max_iter if max_iter is None else max_iter
    gtol = cfg.gtol if gtol is None else gtol
    mesh = energy.mesh
    interior = mesh.interior
    w = init.values.copy()
    w[mesh.boundary] = energy.trace
    weights = list(cfg.penalty_weights) if energy.cone_K is not None else [0.0]
    history: List[float] = []
    stages = []

    plan = [(weights[0], e) for e in cfg.eps_schedule] + [(pw, cfg.eps) for pw in weights]
    for pw, eps in plan:
        energy.penalty_weight = pw
        energy.eps = eps

        def fun(x):
            wf = w.copy()
            wf[interior] = _unpack(x)
            E, g = energy(wf)
            if not np.isfinite(E):
                return np.inf, None
            return E, _pack(g[interior])

        x0 = _pack(w[interior])
        f0, _ = fun(x0)
        start = len(history)
        history.append(f0)
        x, f, g, it, status = lbfgs(fun, x0, max_iter, gtol, cfg.memory, history=history, ftol=cfg.ftol,
                                        fscale=mesh.area)
        w[interior] = _unpack(x)
        gn = float(np.max(np.abs(g))) if g is not None and len(g) else 0.0
        stages.append(StageResult(pw, eps, it, status, f, gn, start))
    energy.eps = cfg.eps
    converged = stages[-1].status in ("GTOL", "FTOL")
    out = DiscreteMap(w, mesh, True, energy.trace)
    value = energy.value(w, eps=0.0)
    return MinimizeResult(out, value, history, stages, converged,
                          energy.unpenalized(w, eps=0.0), energy.cone_violation(w))
