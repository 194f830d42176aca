"""scikit-learn style front ends.

``IASystemSolver`` fits precoders for a single alignment system;
``UplinkIADesigner`` plans and designs a whole uplink network.  Both keep
their hyperparameters in ``__init__`` so ``get_params``/``set_params`` and
``sklearn.base.clone`` work as usual.
"""
import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import check_channel, check_cross_channels
from .dofcalc import DEFAULT_STAGES, kappa_candidates, plan as make_plan
from .exceptions import InfeasibleKappa
from .ia_core import (IAScenario, build_ia_system, solve_precoders,
                      verify_alignment, zero_force_precoders)
from .orchestrator import design_network, verify_design
from .subspace import Tolerance


class IASystemSolver(TransformerMixin, BaseEstimator):
    """Align the interference of K_t transmitters at K_r receivers.

    Parameters
    ----------
    d : int
        Streams per transmitter.
    kappa_t : int or "auto"
        Target subset size.  ``"auto"`` picks the smallest feasible value.
    coeff_seed : int
        Seed of the random combining coefficients.
    tol : float
        Relative rank tolerance.
    zero_forcing : bool or "auto"
        Force (or forbid) the zero-forcing construction.  ``"auto"`` uses it
        when ``N_t > K_r * M_r``.

    Attributes
    ----------
    scenario_ : IAScenario
    precoders_ : PrecoderSet
    report_ : AlignmentReport
        Alignment measured on the training channels.
    """

    def __init__(self, d=1, kappa_t="auto", coeff_seed=0, tol=1e-10, zero_forcing="auto"):
        self.d = d
        self.kappa_t = kappa_t
        self.coeff_seed = coeff_seed
        self.tol = tol
        self.zero_forcing = zero_forcing

    def fit(self, X, y=None):
        H = check_cross_channels(X)
        K_r, K_t, M_r, N_t = H.shape
        tol = Tolerance(self.tol)
        zf = N_t > K_r * M_r if self.zero_forcing == "auto" else bool(self.zero_forcing)
        if zf:
            self.scenario_ = IAScenario(K_t, K_r, 0, N_t, M_r, H, zero_forcing=True)
            self.precoders_ = zero_force_precoders(self.scenario_, self.d, tol)
        else:
            kappa = self.kappa_t
            if kappa == "auto":
                feasible = [k for k in kappa_candidates(K_t, K_r, M_r, N_t) if k > 0]
                if not feasible:
                    raise InfeasibleKappa(
                        f"no feasible kappa_t for K_t={K_t}, K_r={K_r}, M_r={M_r}, N_t={N_t}")
                kappa = feasible[0]
            self.scenario_ = IAScenario(K_t, K_r, kappa, N_t, M_r, H)
            self.system_ = build_ia_system(self.scenario_, self.coeff_seed)
            self.precoders_ = solve_precoders(self.system_, self.d, tol)
        self.report_ = verify_alignment(self.scenario_, self.precoders_, tol)
        return self

    def transform(self, X):
        """Received interference ``[H_j1 V_1, ..., H_jK_t V_K_t]`` per receiver.

        Returns an array of shape ``(K_r, M_r, K_t * d)``.
        """
        check_is_fitted(self, "precoders_")
        H = check_cross_channels(X)
        K_r, K_t = H.shape[:2]
        V = self.precoders_.V
        if K_t != len(V):
            raise ValueError(f"fitted for {len(V)} transmitters, got {K_t}")
        return np.stack([np.hstack([H[j, i] @ V[i] for i in range(K_t)]) for j in range(K_r)])

    def score(self, X, y=None):
        """1.0 when the fitted precoders align interference on ``X``."""
        check_is_fitted(self, "precoders_")
        H = check_cross_channels(X)
        sc = self.scenario_
        probe = IAScenario(sc.K_t, sc.K_r, sc.kappa_t, sc.N_t, sc.M_r, H, sc.zero_forcing)
        return float(verify_alignment(probe, self.precoders_, Tolerance(self.tol)).success)


class UplinkIADesigner(BaseEstimator):
    """Plan and build precoders for every user of a multicell uplink.

    ``fit`` takes a channel realization (or its ``(L, L, K, M_r, N_t)``
    array), runs the parameter search and designs the precoders for that
    channel.  Precoders are channel-specific, so ``score`` and ``verify``
    are meant for the channel the designer was fitted on.

    Attributes
    ----------
    config_ : NetworkConfig
    plan_ : Plan
    design_ : NetworkDesign
    """

    def __init__(self, max_stages=DEFAULT_STAGES, seed=0, tol=1e-10):
        self.max_stages = max_stages
        self.seed = seed
        self.tol = tol

    def fit(self, X, y=None):
        channel = check_channel(X)
        cfg = channel.config
        self.config_ = cfg
        self.plan_ = make_plan(cfg.L, cfg.K, cfg.M_r, cfg.N_t, self.max_stages)
        self.design_ = design_network(cfg, channel, self.plan_, self.seed, Tolerance(self.tol))
        self.channel_ = channel
        return self

    @property
    def precoders_(self):
        return self.design_.precoders

    def verify(self, X=None):
        check_is_fitted(self, "design_")
        channel = self.channel_ if X is None else check_channel(X)
        return verify_design(self.config_, channel, self.design_, Tolerance(self.tol))

    def score(self, X=None, y=None):
        """Fraction of base stations where every stream is decodable."""
        report = self.verify(X)
        return sum(b.decodable for b in report.per_bs) / len(report.per_bs)
