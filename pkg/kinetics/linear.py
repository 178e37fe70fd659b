import numpy as np

from kinetics.core import ReactionNetwork
from utils import KineticsError


class LinearDecayNetwork(ReactionNetwork):
    """Single species C with diffusion and linear degradation and no
    production. The initial value is either the constant ``c0`` or a
    callable of the node coordinates set with ``set_initial``. Used for
    verification runs where the exact discrete behaviour is known.
    """

    name = 'linear_decay'
    species = ['C']
    PARAMETERS = ['D', 'd', 'c0']
    is_linear = True

    def __init__(self, params=None):
        super(LinearDecayNetwork, self).__init__()
        params = dict(params or {})
        unknown = sorted(set(params) - set(self.PARAMETERS))
        if unknown:
            raise KineticsError("Unknown parameters for network '%s': %s"
                                % (self.name, ", ".join(unknown)))
        self.D = float(params.get('D', 1.))
        self.d = float(params.get('d', 0.))
        self.c0 = float(params.get('c0', 1.))
        if self.D < 0. or self.d < 0.:
            raise KineticsError("D and d must be nonnegative")
        self.initial = None

    def set_initial(self, func):
        """Uses ``func(x, y)`` for the initial values instead of ``c0``. """
        self.initial = func

    def diffusion(self, species):
        return self.D

    def degradation(self, species):
        return self.d

    def production(self, conc, labels):
        self.check_labels(labels)
        return {'C': np.zeros_like(np.asarray(conc['C'], dtype=float))}

    def initial_conditions(self, mesh):
        if self.initial is None:
            return {'C': np.full(mesh.n_nodes, self.c0)}
        x, y = mesh.nodes[:, 0], mesh.nodes[:, 1]
        return {'C': np.asarray(self.initial(x, y), dtype=float)
                * np.ones(mesh.n_nodes)}

    def describe(self):
        return "%s: D=%g d=%g" % (self.name, self.D, self.d)
