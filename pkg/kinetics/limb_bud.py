"""Three-species limb bud network. A is produced in domain1 and inhibited
by B, B is produced everywhere, activated by A and inhibited by C, and C
is produced in domain3 and activated by A. All species diffuse through
the whole domain and degrade linearly. Initially A = 1 in domain3 and B
= C = 0.

Parameter defaults are the nondimensional values for the characteristic
time T = 3600 s and length L = 150 um.
"""

import numpy as np

from kinetics.core import ReactionNetwork, hill_act, hill_inh, \
    clamp_nonnegative
from utils import KineticsError


DEFAULT_T = 3600.
"""Characteristic time in seconds. """


DEFAULT_L = 150.
"""Characteristic length in micrometers. """


class HillParams(object):
    """Half-saturation constants of the Hill terms. The Hill exponent is
    always 2.
    """

    hill_exponent = 2

    def __init__(self, K_BA=0.2, K_AB=0.125, K_CB=0.5, K_AC=0.025):
        self.K_BA = float(K_BA)
        self.K_AB = float(K_AB)
        self.K_CB = float(K_CB)
        self.K_AC = float(K_AC)
        for name in ('K_BA', 'K_AB', 'K_CB', 'K_AC'):
            if not getattr(self, name) > 0.:
                raise KineticsError("%s must be positive, got %g"
                                    % (name, getattr(self, name)))


class RateParams(object):
    """Production, degradation and diffusion constants. Values which
    are not given are derived from ``T``: D = T, rho_A = 1e-4 T,
    rho_B = 50 (1e-4 T), rho_C = 200 (1e-4 T) and d = 1e-6 T for all
    species. ``D_A``, ``D_B`` and ``D_C`` override the shared diffusion
    constant per species.
    """

    def __init__(self, T=DEFAULT_T, L=DEFAULT_L, D=None, rho_A=None,
                 rho_B=None, rho_C=None, d_A=None, d_B=None, d_C=None,
                 D_A=None, D_B=None, D_C=None):
        self.T = float(T)
        self.L = float(L)
        if not self.T > 0. or not self.L > 0.:
            raise KineticsError("T and L must be positive")
        rho = 1e-4 * self.T

        def pick(value, default):
            return float(default if value is None else value)

        self.D_diff = pick(D, 1. * self.T)
        self.rho_A = pick(rho_A, rho)
        self.rho_B = pick(rho_B, 50. * rho)
        self.rho_C = pick(rho_C, 200. * rho)
        self.d_A = pick(d_A, 1e-6 * self.T)
        self.d_B = pick(d_B, 1e-6 * self.T)
        self.d_C = pick(d_C, 1e-6 * self.T)
        self.D_A = pick(D_A, self.D_diff)
        self.D_B = pick(D_B, self.D_diff)
        self.D_C = pick(D_C, self.D_diff)
        for name in ('D_diff', 'rho_A', 'rho_B', 'rho_C', 'd_A', 'd_B', 'd_C',
                     'D_A', 'D_B', 'D_C'):
            if getattr(self, name) < 0.:
                raise KineticsError("%s must be nonnegative, got %g"
                                    % (name, getattr(self, name)))


class LimbBudNetwork(ReactionNetwork):
    """The A/B/C regulatory network with subdomain restricted production
    of A (domain1) and C (domain3).
    """

    name = 'limb_bud'
    species = ['A', 'B', 'C']
    PARAMETERS = ['T', 'L', 'D', 'D_A', 'D_B', 'D_C', 'rho_A', 'rho_B',
                  'rho_C', 'd_A', 'd_B', 'd_C', 'K_BA', 'K_AB', 'K_CB', 'K_AC']

    REGION_A = 'domain1'
    REGION_C = 'domain3'
    INITIAL_REGION_A = 'domain3'

    def __init__(self, params=None):
        """Creates the network.

        Args:
            params (dict): Overrides of the parameter defaults, keyed by
                           the names in ``PARAMETERS``

        Raises:
            KineticsError. If a parameter is unknown or invalid
        """
        super(LimbBudNetwork, self).__init__()
        params = dict(params or {})
        unknown = sorted(set(params) - set(self.PARAMETERS))
        if unknown:
            raise KineticsError("Unknown parameters for network '%s': %s"
                                % (self.name, ", ".join(unknown)))
        hill_keys = ('K_BA', 'K_AB', 'K_CB', 'K_AC')
        self.hill = HillParams(**dict((k, v) for k, v in params.items()
                                      if k in hill_keys))
        self.rates_params = RateParams(**dict(
            (k, v) for k, v in params.items() if k not in hill_keys))
        self.subdomain_ids = ['domain1', 'domain2', 'domain3']

    @property
    def production_regions(self):
        return {'A': [self.REGION_A], 'C': [self.REGION_C]}

    def bind(self, subdomain_ids):
        super(LimbBudNetwork, self).bind(subdomain_ids)
        if self.INITIAL_REGION_A not in subdomain_ids:
            raise KineticsError("Initial region '%s' of A is not a subdomain"
                                % self.INITIAL_REGION_A)

    def diffusion(self, species):
        return getattr(self.rates_params, 'D_' + species)

    def degradation(self, species):
        return getattr(self.rates_params, 'd_' + species)

    def production(self, conc, labels):
        """Effective production rates P_A, P_B, P_C. Indicators are crisp:
        P_A is exactly zero outside domain1 and P_C outside domain3.
        """
        self.check_labels(labels)
        A = clamp_nonnegative(conc['A'], 'A')
        B = clamp_nonnegative(conc['B'], 'B')
        C = clamp_nonnegative(conc['C'], 'C')
        labels = np.asarray(labels, dtype=object)
        in_1 = (labels == self.REGION_A).astype(float)
        in_3 = (labels == self.REGION_C).astype(float)
        r, h = self.rates_params, self.hill
        return {'A': r.rho_A * hill_inh(B, h.K_BA) * in_1,
                'B': r.rho_B * hill_act(A, h.K_AB) * hill_inh(C, h.K_CB),
                'C': r.rho_C * hill_act(A, h.K_AC) * in_3}

    def effective_production(self, A, B, C, label):
        """Production terms at one point.

        Returns:
            tuple. (P_A, P_B, P_C)
        """
        prod = self.production({'A': A, 'B': B, 'C': C}, label)
        return tuple(float(prod[s]) for s in self.species)

    def reaction_rates(self, A, B, C, label):
        """Reaction rates at one point, production minus degradation.

        Returns:
            tuple. (R_A, R_B, R_C)
        """
        rates = self.rates({'A': A, 'B': B, 'C': C}, label)
        return tuple(float(rates[s]) for s in self.species)

    def initial_conditions(self, mesh):
        """A is the nodal patch-area fraction of the domain3 elements
        around each node, B and C are zero.
        """
        area = np.abs(mesh.signed_areas())
        in_3 = mesh.element_mask(self.INITIAL_REGION_A)
        tri = mesh.triangles.ravel()
        num = np.bincount(tri, weights=np.repeat(area * in_3, 3),
                          minlength=mesh.n_nodes)
        den = np.bincount(tri, weights=np.repeat(area, 3),
                          minlength=mesh.n_nodes)
        zeros = np.zeros(mesh.n_nodes)
        return {'A': num / np.where(den > 0., den, 1.),
                'B': zeros.copy(), 'C': zeros.copy()}

    def describe(self):
        r, h = self.rates_params, self.hill
        return ("%s: D=%g rho=(%g, %g, %g) d=(%g, %g, %g) K_BA=%g K_AB=%g "
                "K_CB=%g K_AC=%g" % (self.name, r.D_diff, r.rho_A, r.rho_B,
                                     r.rho_C, r.d_A, r.d_B, r.d_C, h.K_BA,
                                     h.K_AB, h.K_CB, h.K_AC))
