"""Brute-force oracle: simulate the actual random matrix products and
estimate the almost-sure growth rate, the variance, and the exponential
moment growth rate, with standard errors.

Each replica evolves the row vector x0 = (1, 0), renormalising to unit
norm every step and accumulating the log norm; replica r draws from its
own counter-based (Philox) stream keyed by (seed, r), so results are
bit-reproducible and independent of replica scheduling.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import HeavyTailError
from .families import Family
from .laws import Exponential
from .sl2 import GroupElement, SubgroupKind, one_param

__all__ = ["ModelSpec", "MCEstimate", "sample_step", "estimate_gamma", "estimate_sigma2", "estimate_gle"]

_CHUNK = 4096  # fixed draw block; part of the reproducibility contract


@dataclass(frozen=True)
class ModelSpec:
    """Random product g = d(t) e(tau): d-parameter law `law`, e-parameter
    exponential of rate rho (overridable for degenerate test models), and a
    sign flip of the diagonal parameter for the triangular family."""

    family: Family
    law: object
    rho: float
    sign: int = 1
    second_law: object = None  # test hook: replaces Exponential(rho)

    def __post_init__(self):
        if self.second_law is None and (not (self.rho > 0) or not math.isfinite(self.rho)):
            raise ValueError("rho must be positive and finite")
        if self.sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")
        if self.sign == -1 and self.family is not Family.NMINUS_A1:
            raise ValueError("sign applies only to the triangular family")

    def label(self) -> str:
        # ';' separators keep the label safe inside one CSV cell
        extra = "" if self.sign == 1 else ";sign=-"
        second = f"rho={self.rho:g}" if self.second_law is None else self.second_law.label()
        text = f"{self.family.value}({self.law.label()};{second}{extra})"
        return text.replace(",", ";")

    def _second_sample(self, rng, size):
        if self.second_law is not None:
            return self.second_law.sample(rng, size)
        return Exponential(self.rho).sample(rng, size)


_FACTORS = {
    Family.K_NPLUS: (SubgroupKind.K, SubgroupKind.NPLUS),
    Family.NMINUS_K: (SubgroupKind.NMINUS, SubgroupKind.K),
    Family.NMINUS_NPLUS: (SubgroupKind.NMINUS, SubgroupKind.NPLUS),
    Family.NMINUS_A1: (SubgroupKind.NMINUS, SubgroupKind.A1),
}


def sample_step(model: ModelSpec, rng) -> GroupElement:
    """One random factor d(t) e(tau)."""
    t = float(model.law.sample(rng, 1)[0])
    tau = float(model._second_sample(rng, 1)[0])
    d_kind, e_kind = _FACTORS[model.family]
    if model.family is Family.NMINUS_A1:
        tau *= model.sign
    return one_param(d_kind, t) @ one_param(e_kind, tau)


def _replica_rng(seed: int, replica: int) -> np.random.Generator:
    key = np.array([np.uint64(seed & 0xFFFFFFFFFFFFFFFF), np.uint64(replica)], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def _step_block(family: Family, sign: int, x1, x2, t, tau):
    """Apply one random factor to every replica's row vector (in place
    semantics via returned arrays); t, tau are per-replica parameter draws."""
    if family is Family.K_NPLUS:
        c, s = np.cos(0.5 * t), np.sin(0.5 * t)
        y1 = x1 * c + x2 * s
        y2 = -x1 * s + x2 * c
        return y1, y1 * tau + y2
    # remaining families share the lower-shear first factor
    y1 = x1 + x2 * t
    y2 = x2
    if family is Family.NMINUS_K:
        c, s = np.cos(0.5 * tau), np.sin(0.5 * tau)
        return y1 * c + y2 * s, -y1 * s + y2 * c
    if family is Family.NMINUS_NPLUS:
        return y1, y1 * tau + y2
    if family is Family.NMINUS_A1:
        e = np.exp(0.5 * sign * tau)
        return y1 * e, y2 / e
    raise ValueError(f"unknown family {family!r}")


def _accumulate_lognorms(
    model: ModelSpec,
    n_steps: int,
    n_replicas: int,
    seed: int,
    x0=(1.0, 0.0),
    norm: str = "l2",
) -> np.ndarray:
    """Accumulated log norm of x0 Pi_n per replica.

    The limits do not depend on the start vector or on the norm; both are
    exposed so that invariance can be tested.
    """
    if x0 == (0.0, 0.0):
        raise ValueError("start vector must be nonzero")
    if norm == "l2":
        norm_fn = np.hypot
    elif norm == "linf":
        norm_fn = lambda a, b: np.maximum(np.abs(a), np.abs(b))  # noqa: E731
    else:
        raise ValueError("norm must be 'l2' or 'linf'")
    gens = [_replica_rng(seed, r) for r in range(n_replicas)]
    scale = float(norm_fn(np.asarray(x0[0]), np.asarray(x0[1])))
    x1 = np.full(n_replicas, x0[0] / scale)
    x2 = np.full(n_replicas, x0[1] / scale)
    acc = np.zeros(n_replicas)
    done = 0
    # block size is a function of (n_steps, n_replicas) only, so results
    # stay reproducible from (seed, model, sizes); the cap bounds memory
    blk = max(1, min(_CHUNK, n_steps, 2_097_152 // n_replicas))
    t_blk = np.empty((n_replicas, blk))
    tau_blk = np.empty((n_replicas, blk))
    while done < n_steps:
        block = min(blk, n_steps - done)
        for r, g in enumerate(gens):
            t_blk[r, :block] = model.law.sample(g, block)
            tau_blk[r, :block] = model._second_sample(g, block)
        for j in range(block):
            x1, x2 = _step_block(model.family, model.sign, x1, x2, t_blk[:, j], tau_blk[:, j])
            size = norm_fn(x1, x2)
            acc += np.log(size)
            x1 /= size
            x2 /= size
        done += block
    return acc


@dataclass(frozen=True)
class MCEstimate:
    """Point estimate with its standard error and full reproduction data."""

    value: float
    stderr: float
    n_steps: int
    n_replicas: int
    seed: int
    diagnostics: dict = field(default_factory=dict, compare=False)


def estimate_gamma(
    model: ModelSpec, n_steps: int, n_replicas: int, seed: int, x0=(1.0, 0.0), norm: str = "l2"
) -> MCEstimate:
    """Almost-sure growth rate: mean over replicas of (log norm)/n."""
    if n_steps < 10**3:
        raise ValueError("need n_steps >= 1e3 for the growth-rate estimate")
    if n_replicas < 2:
        raise ValueError("need at least 2 replicas")
    g = _accumulate_lognorms(model, n_steps, n_replicas, seed, x0, norm) / n_steps
    return MCEstimate(
        value=float(np.mean(g)),
        stderr=float(np.std(g, ddof=1) / math.sqrt(n_replicas)),
        n_steps=n_steps,
        n_replicas=n_replicas,
        seed=seed,
    )


def estimate_sigma2(
    model: ModelSpec, n_steps: int, n_replicas: int, seed: int, x0=(1.0, 0.0), norm: str = "l2"
) -> MCEstimate:
    """Variance rate: Var(log norm)/n across replicas, jackknife stderr."""
    if n_steps < 10**4:
        raise ValueError("need n_steps >= 1e4 for the variance estimate")
    if n_replicas < 8:
        raise ValueError("need at least 8 replicas for the jackknife")
    s = _accumulate_lognorms(model, n_steps, n_replicas, seed, x0, norm)
    r = len(s)
    value = float(np.var(s, ddof=1) / n_steps)
    # leave-one-out variances from the sufficient statistics
    tot, tot2 = s.sum(), (s**2).sum()
    loo_mean = (tot - s) / (r - 1)
    loo_var = (tot2 - s**2 - (r - 1) * loo_mean**2) / (r - 2)
    theta = loo_var / n_steps
    stderr = math.sqrt((r - 1) / r * np.sum((theta - theta.mean()) ** 2))
    return MCEstimate(
        value=value, stderr=float(stderr), n_steps=n_steps, n_replicas=n_replicas, seed=seed
    )


def estimate_gle(
    model: ModelSpec,
    ell,
    n_steps: int,
    n_replicas: int,
    seed: int,
    on_heavy_tail: str = "raise",
    x0=(1.0, 0.0),
    norm: str = "l2",
) -> MCEstimate:
    """Exponential-moment growth rate at index ell: log-mean-exp over
    replicas of 2 ell times the accumulated log norm, divided by n.

    The weights w_r = exp(2 ell log-norm_r) are formed against their
    running maximum (log-sum-exp), and an effective-sample-size collapse
    (max weight share > 1/2) is an error by default since the estimate is
    then dominated by a single trajectory.  Values of |Re ell| beyond 1
    additionally draw a heavy-tail warning up front.
    """
    if n_replicas < 2:
        raise ValueError("need at least 2 replicas")
    ell = complex(ell)
    if abs(ell.real) > 1.0:
        warnings.warn(
            f"|Re ell| = {abs(ell.real):g} > 1: exponential moments are heavy-tailed",
            stacklevel=2,
        )
    s = _accumulate_lognorms(model, n_steps, n_replicas, seed, x0, norm)
    y = 2.0 * ell * s
    m = float(np.max(y.real))
    w = np.exp(y - m)
    w_abs = np.abs(w)
    mean_w = np.mean(w)
    share = float(np.max(w_abs) / np.sum(w_abs))
    ess = float(np.sum(w_abs) ** 2 / np.sum(w_abs**2))
    diagnostics = {"max_weight_share": share, "ess": ess}
    if share > 0.5:
        msg = (
            f"effective sample size collapsed (max weight share {share:.3f}, ESS {ess:.1f} "
            f"of {n_replicas}); the exponential-moment estimate is unreliable"
        )
        if on_heavy_tail == "raise":
            raise HeavyTailError(msg, diagnostics=diagnostics)
        warnings.warn(msg, stacklevel=2)
    value_c = (m + cmath.log(complex(mean_w))) / n_steps
    stderr = float(np.std(w_abs, ddof=1) / (math.sqrt(n_replicas) * abs(mean_w) * n_steps))
    if ell.imag != 0.0:
        diagnostics["value_imag"] = value_c.imag
    return MCEstimate(
        value=float(value_c.real),
        stderr=stderr,
        n_steps=n_steps,
        n_replicas=n_replicas,
        seed=seed,
        diagnostics=diagnostics,
    )
