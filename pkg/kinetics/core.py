from abc import abstractmethod
import logging

import numpy as np

import utils
from utils import KineticsError


def hill_act(x, K):
    """Activating Hill term x^2 / (K^2 + x^2) with exponent 2.

    Args:
        x (float, ndarray): Nonnegative concentration
        K (float): Half-saturation constant, positive

    Returns:
        float, ndarray. Value in [0, 1)
    """
    x2 = x * x
    return x2 / (K * K + x2)


def hill_inh(x, K):
    """Inhibiting Hill term K^2 / (K^2 + x^2) with exponent 2. """
    K2 = K * K
    return K2 / (K2 + x * x)


def clamp_nonnegative(x, species=""):
    """Clamps negative concentrations to zero before they enter Hill
    terms. Values below ``-utils.NEGATIVE_TOLERANCE`` are reported.
    """
    x = np.asarray(x, dtype=float)
    low = float(np.min(x)) if x.size else 0.
    if low < -utils.NEGATIVE_TOLERANCE:
        logging.warning("Clamping negative concentration %s = %.3g to 0 in "
                        "the reaction terms" % (species, low))
    return np.maximum(x, 0.)


class ReactionNetwork(object):
    """A reaction network defines the species of a simulation, their
    diffusion and degradation constants and the production terms. The
    production terms may depend on the subdomain label of the element
    they are evaluated in. Degradation is linear (d * c) and handled
    implicitly by the solver; ``production`` must return only the
    remaining (nonnegative) source terms.

    Networks are registered by their ``name`` attribute in
    ``kinetics.NETWORK_REGISTRY``.
    """

    species = []
    """Species names in solve order. """

    PARAMETERS = []
    """Names of the parameters the constructor accepts. """

    is_linear = False
    """True if the production terms do not depend on the concentrations,
    in which case the solver needs no fixed point iteration.
    """

    def __init__(self):
        """Networks without default subdomains accept every label until
        ``bind`` is called.
        """
        super(ReactionNetwork, self).__init__()
        self.subdomain_ids = None

    @property
    def production_regions(self):
        """Species -> list of subdomain ids the species is restricted to.
        Species without an entry are produced everywhere.
        """
        return {}

    def bind(self, subdomain_ids):
        """Binds the network to the subdomains of a geometry.

        Args:
            subdomain_ids (list): Subdomain ids of the geometry

        Raises:
            KineticsError. If a production region is not a subdomain
        """
        missing = sorted(set(r for regions in self.production_regions.values()
                             for r in regions) - set(subdomain_ids))
        if missing:
            raise KineticsError("Network '%s' needs subdomains %s which the "
                                "geometry does not define (it has %s)"
                                % (self.name, ", ".join(missing),
                                   ", ".join(subdomain_ids)))
        self.subdomain_ids = list(subdomain_ids)

    def check_labels(self, labels):
        """Raises ``KineticsError`` if a label is not a known subdomain.
        Before ``bind()`` every label is accepted.
        """
        if self.subdomain_ids is None:
            return
        unknown = set(np.unique(np.asarray(labels, dtype=object)).tolist()) \
            - set(self.subdomain_ids)
        if unknown:
            raise KineticsError("Unknown subdomain label(s): %s"
                                % ", ".join(sorted(map(str, unknown))))

    @abstractmethod
    def diffusion(self, species):
        """Diffusion constant of ``species``. """
        raise NotImplementedError

    @abstractmethod
    def degradation(self, species):
        """Linear degradation rate of ``species``. """
        raise NotImplementedError

    @abstractmethod
    def production(self, conc, labels):
        """Effective production rates without degradation.

        Args:
            conc (dict): Species -> concentration array
            labels (ndarray): Subdomain ids, broadcastable against the
                              concentration arrays

        Returns:
            dict. Species -> production rate array
        """
        raise NotImplementedError

    @abstractmethod
    def initial_conditions(self, mesh):
        """Nodal initial concentrations on ``mesh``.

        Returns:
            dict. Species -> nodal vector
        """
        raise NotImplementedError

    def rates(self, conc, labels):
        """Full reaction rates R = production - degradation * c. """
        prod = self.production(conc, labels)
        return dict((s, prod[s] - self.degradation(s) * np.asarray(conc[s]))
                    for s in self.species)

    def describe(self):
        """One-line parameter summary for the log. """
        return self.name
