import logging
import math
from typing import Callable, Dict, Optional

import numpy as np
from scipy.special import jv

from constants.geometry import DomainKind
from constants.solver import NonlinearityPreset
from schemas.geometry import RadialDomain
from schemas.solver import NonlinearitySpec
from services.eigen_service import get_eigen_service

logger = logging.getLogger(__name__)

ReactionFn = Callable[[float, np.ndarray, np.ndarray], np.ndarray]
LipschitzFn = Callable[[float], float]


class Nonlinearity:
    """
    f(t, r, u) with its derivative f_u. Evaluations broadcast r (shape (nr, 1))
    against u (shape (nr, ntheta)).
    """

    def __init__(
            self,
            spec: NonlinearitySpec,
            f: ReactionFn,
            f_u: ReactionFn,
            lipschitz: LipschitzFn,
            autonomous: bool,
            period: Optional[float] = None,
    ):
        self.spec = spec
        self._f = f
        self._f_u = f_u
        self._lipschitz = lipschitz
        self.autonomous = autonomous
        self.period = period

    @property
    def id(self) -> NonlinearityPreset:
        return self.spec.id

    @property
    def params(self) -> Dict[str, float]:
        return dict(self.spec.params)

    def f(self, t: float, r: np.ndarray, u: np.ndarray) -> np.ndarray:
        return np.broadcast_to(self._f(t, r, u), u.shape)

    def f_u(self, t: float, r: np.ndarray, u: np.ndarray) -> np.ndarray:
        return np.broadcast_to(self._f_u(t, r, u), u.shape)

    def lipschitz_bound(self, K: float) -> float:
        """Lipschitz constant of u -> f(t, r, u) on |u| <= K, uniform in (t, r)."""
        if K < 0:
            raise ValueError("K must be non-negative")
        return self._lipschitz(K)

    def __repr__(self) -> str:
        return f"<Nonlinearity(id={self.spec.id.value}, params={self.spec.params})>"


class ReactionService:
    REQUIRED_PARAMS = {
        NonlinearityPreset.HEAT: (),
        NonlinearityPreset.LINEAR: ("c",),
        NonlinearityPreset.CUBIC: ("a", "b"),
        NonlinearityPreset.EIGEN_PUMP: (),
        NonlinearityPreset.RADIAL_WEIGHTED: ("d",),
        NonlinearityPreset.PERIODIC: ("eps", "T"),
        NonlinearityPreset.PERIODIC_FORCED: ("eps", "T"),
    }

    def __init__(self, domain: RadialDomain):
        self.domain = domain
        self.eigen_service = get_eigen_service()

    def _lambda2(self, params: Dict[str, float]) -> float:
        if "lam" in params:
            return params["lam"]
        if self.domain.kind != DomainKind.DISK:
            logger.error("No lam given for a lambda_2 based nonlinearity on a %s domain", self.domain.kind.value)
            raise ValueError("On an annulus the second Dirichlet eigenvalue must be passed as parameter 'lam'")
        return self.eigen_service.second_eigenvalue(self.domain)

    def build(self, spec: NonlinearitySpec) -> Nonlinearity:
        params = spec.params
        missing = [name for name in self.REQUIRED_PARAMS[spec.id] if name not in params]
        if missing:
            logger.error("Nonlinearity %s is missing parameters: %s", spec.id.value, missing)
            raise ValueError(f"Nonlinearity '{spec.id.value}' requires parameters: {', '.join(missing)}")

        r_max = self.domain.r_outer

        if spec.id == NonlinearityPreset.HEAT:
            return Nonlinearity(
                spec=spec,
                f=lambda t, r, u: np.zeros_like(u),
                f_u=lambda t, r, u: np.zeros_like(u),
                lipschitz=lambda K: 0.0,
                autonomous=True,
            )

        if spec.id == NonlinearityPreset.LINEAR:
            c = params["c"]
            return Nonlinearity(
                spec=spec,
                f=lambda t, r, u: c * u,
                f_u=lambda t, r, u: np.full_like(u, c),
                lipschitz=lambda K: abs(c),
                autonomous=True,
            )

        if spec.id == NonlinearityPreset.CUBIC:
            a, b = params["a"], params["b"]
            return Nonlinearity(
                spec=spec,
                f=lambda t, r, u: a * u - b * u ** 3,
                f_u=lambda t, r, u: a - 3.0 * b * u ** 2,
                lipschitz=lambda K: abs(a) + 3.0 * abs(b) * K ** 2,
                autonomous=True,
            )

        if spec.id == NonlinearityPreset.EIGEN_PUMP:
            lam = self._lambda2(params)
            return Nonlinearity(
                spec=spec,
                f=lambda t, r, u: lam * u - u ** 3,
                f_u=lambda t, r, u: lam - 3.0 * u ** 2,
                lipschitz=lambda K: lam + 3.0 * K ** 2,
                autonomous=True,
            )

        if spec.id == NonlinearityPreset.RADIAL_WEIGHTED:
            d = params["d"]
            return Nonlinearity(
                spec=spec,
                f=lambda t, r, u: u - u ** 3 + d * r * u,
                f_u=lambda t, r, u: 1.0 - 3.0 * u ** 2 + d * r,
                lipschitz=lambda K: 1.0 + 3.0 * K ** 2 + abs(d) * r_max,
                autonomous=True,
            )

        lam = self._lambda2(params)
        eps, period = params["eps"], params["T"]
        if period <= 0:
            raise ValueError("Period T must be positive")

        if spec.id == NonlinearityPreset.PERIODIC:
            return Nonlinearity(
                spec=spec,
                f=lambda t, r, u: lam * u - u ** 3 + eps * math.sin(2.0 * math.pi * t / period) * u,
                f_u=lambda t, r, u: lam - 3.0 * u ** 2 + eps * math.sin(2.0 * math.pi * t / period),
                lipschitz=lambda K: lam + 3.0 * K ** 2 + abs(eps),
                autonomous=False,
                period=period,
            )

        # periodic_forced: the forcing profile only depends on r, f(., ., 0) stays bounded by |eps|
        zero = self.eigen_service.bessel_zero(0, 1)
        return Nonlinearity(
            spec=spec,
            f=lambda t, r, u: lam * u - u ** 3 + eps * math.sin(2.0 * math.pi * t / period) * jv(0, zero * r / r_max),
            f_u=lambda t, r, u: lam - 3.0 * u ** 2,
            lipschitz=lambda K: lam + 3.0 * K ** 2,
            autonomous=False,
            period=period,
        )


def get_reaction_service(domain: RadialDomain) -> ReactionService:
    return ReactionService(domain)
