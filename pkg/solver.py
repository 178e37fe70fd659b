"""Linear finite element solver for reaction-diffusion systems on a
moving mesh.

Every step solves, per species, the conservative implicit Euler system

    (M1 c1 - M0 c0) / dt + D K1 c1 + d M1 c1 = F(c1)

where M0 and M1 are the consistent P1 mass matrices of the meshes at
the start and at the end of the step and K1 the P1 stiffness matrix at
the end of the step. The mesh moves with the tissue, so the changing
mass matrix carries advection and dilution. Zero-flux conditions on the
outer boundary are the natural ones and need no extra terms. The
nonlinear production terms are resolved by Picard iteration which
sweeps over the species in order (Gauss-Seidel).
"""

import logging

import numpy as np
from scipy.sparse.linalg import splu

import mesh as mesh_module
import utils
from utils import ConfigError, SolverError


class SolverConfig(object):
    """Time stepping and tolerance settings of one stage.

    Attributes:
        dt (float): Time step
        t_end (float): Duration of a stage
        picard_tol (float): Tolerance on the fixed point residual, the
                            max-norm change of one Picard sweep relative
                            to max(1, |c|)
        picard_max_iters (int): Maximum number of Picard sweeps
        linear_solver_tol (float): Normwise backward error accepted for
                                   the linear solves
        strict_mesh (bool): Fail on inverted elements and maximum
                            principle violations instead of warning
    """

    def __init__(self, dt=0.01, t_end=1.0, picard_tol=1e-10,
                 picard_max_iters=50, linear_solver_tol=1e-12,
                 strict_mesh=False):
        self.dt = float(dt)
        self.t_end = float(t_end)
        self.picard_tol = float(picard_tol)
        self.picard_max_iters = int(picard_max_iters)
        self.linear_solver_tol = float(linear_solver_tol)
        self.strict_mesh = bool(strict_mesh)
        self.validate()

    def validate(self):
        """Raises ``ConfigError`` naming the offending field. """
        if not self.dt > 0.:
            raise ConfigError("must be positive, got %g" % self.dt,
                              path="solver.dt")
        if not self.t_end >= self.dt:
            raise ConfigError("must be at least dt=%g, got %g"
                              % (self.dt, self.t_end), path="solver.t_end")
        for name in ('picard_tol', 'linear_solver_tol'):
            if not getattr(self, name) > 0.:
                raise ConfigError("must be positive", path="solver." + name)
        if self.picard_max_iters < 1:
            raise ConfigError("must be at least 1",
                              path="solver.picard_max_iters")

    @property
    def n_steps(self):
        """Number of steps per stage. The last step is shortened if
        ``t_end`` is not a multiple of ``dt``.
        """
        return int(np.ceil(self.t_end / self.dt - 1e-9))

    def step_times(self):
        """Times at the end of each step, the last one equal to t_end. """
        times = np.minimum(np.arange(1, self.n_steps + 1) * self.dt,
                           self.t_end)
        times[-1] = self.t_end
        return times

    def as_dict(self):
        return {'dt': self.dt, 't_end': self.t_end,
                'picard_tol': self.picard_tol,
                'picard_max_iters': self.picard_max_iters,
                'linear_solver_tol': self.linear_solver_tol,
                'strict_mesh': self.strict_mesh}


class SolverState(object):
    """Nodal concentrations at a point in time on a given mesh.

    Attributes:
        concentrations (dict): Species -> nodal vector
        time (float): Time within the current stage
        mesh (Mesh): Mesh the vectors live on
    """

    def __init__(self, concentrations, time, mesh):
        self.concentrations = dict((s, np.asarray(c, dtype=float))
                                   for s, c in concentrations.items())
        self.time = float(time)
        self.mesh = mesh
        for s, c in self.concentrations.items():
            if c.shape != (mesh.n_nodes,):
                raise SolverError("Concentration vector of %s has shape %s, "
                                  "mesh has %d nodes"
                                  % (s, c.shape, mesh.n_nodes))

    @property
    def mesh_version(self):
        return self.mesh.version

    def min_value(self):
        return min(float(c.min()) for c in self.concentrations.values())


def assemble(mesh, strict=False):
    """Consistent P1 mass matrix and P1 stiffness matrix of ``mesh``.
    The matrices are cached on the mesh instance.

    Args:
        mesh (Mesh): Current mesh
        strict (bool): Raise ``MeshError`` on inverted elements

    Returns:
        tuple. (M, K) as CSR matrices
    """
    key = ('fem', bool(strict))
    if key not in mesh.cache:
        mesh.cache[key] = mesh_module.p1_matrices(mesh.nodes, mesh.triangles,
                                                  strict)
    return mesh.cache[key]


def total_mass(mesh, c):
    """Integral of the P1 field ``c`` over the mesh, i.e. sum(M c). """
    M, _ = assemble(mesh)
    return float(np.asarray(M.sum(axis=0)).ravel() @ np.asarray(c))


def _element_values(network, mesh, conc):
    """Production terms at the three nodes of every element, evaluated
    with the element's label.
    """
    tri = mesh.triangles
    local = dict((s, conc[s][tri]) for s in network.species)
    labels = np.repeat(mesh.element_labels[:, None], 3, axis=1)
    return network.production(local, labels)


def element_production(network, mesh, conc):
    """Mean production of every species over each element.

    Returns:
        dict. Species -> per element vector
    """
    values = _element_values(network, mesh, conc)
    return dict((s, v.mean(axis=1)) for s, v in values.items())


def nodal_production(network, mesh, conc):
    """Production of every species at the nodes. A node shared by
    elements of different subdomains gets the area weighted mean of
    the element values, so the field is exactly zero at nodes which
    touch no producing element.

    Returns:
        dict. Species -> nodal vector
    """
    values = _element_values(network, mesh, conc)
    area = np.abs(mesh.signed_areas())
    tri = mesh.triangles.ravel()
    weight = np.bincount(tri, weights=np.repeat(area, 3),
                         minlength=mesh.n_nodes)
    weight = np.where(weight > 0., weight, 1.)
    return dict((s, np.bincount(tri, weights=(area[:, None] * v).ravel(),
                                minlength=mesh.n_nodes) / weight)
                for s, v in values.items())


def integrated_production(network, mesh, conc):
    """Domain integral of each production term. Elements enter with
    their signed area like in the mass matrix, so folded regions of an
    inverted mesh are not counted twice.

    Returns:
        dict. Species -> float
    """
    area = mesh.signed_areas()
    return dict((s, float(area @ v))
                for s, v in element_production(network, mesh, conc).items())


def _load_vector(mesh, values):
    """Consistent load vector of a field given per element node. """
    area = mesh.signed_areas()
    local = area[:, None] / 12. * (values + values.sum(axis=1)[:, None])
    return np.bincount(mesh.triangles.ravel(), weights=local.ravel(),
                       minlength=mesh.n_nodes)


def _factorize(A):
    try:
        return splu(A.tocsc())
    except RuntimeError as e:
        raise SolverError("Singular system matrix: %s" % e)


def _solve(lu, A, b, tol, species):
    x = lu.solve(b)
    if not np.all(np.isfinite(x)):
        raise SolverError("Non-finite solution for species %s" % species)
    res = np.abs(A @ x - b).max()
    scale = abs(A).sum(axis=1).max() * np.abs(x).max() + np.abs(b).max()
    if res > tol * max(scale, 1e-300):
        raise SolverError("Linear solve for species %s missed the tolerance "
                          "(backward error %.3g)" % (species, res / scale))
    return x


def step(state, mesh_next, dt, network, config=None):
    """Advances the state by one implicit Euler step onto ``mesh_next``.

    Args:
        state (SolverState): State at the start of the step
        mesh_next (Mesh): Mesh at the end of the step, same connectivity
        dt (float): Step length
        network (ReactionNetwork): Reaction terms and constants
        config (SolverConfig): Tolerances. Defaults are used if None

    Returns:
        SolverState. The state at ``state.time + dt`` on ``mesh_next``

    Raises:
        SolverError. If the Picard iteration does not converge, a linear
        system is singular or the solution is not finite
        MeshError. On inverted elements in strict mode
    """
    config = config or SolverConfig(dt=dt, t_end=dt)
    if mesh_next.n_nodes != state.mesh.n_nodes:
        raise SolverError("Meshes of one step must share their nodes")
    strict = config.strict_mesh
    M0, _ = assemble(state.mesh, strict)
    M1, K1 = assemble(mesh_next, strict)
    old = state.concentrations
    conc = dict((s, old[s].copy()) for s in network.species)
    systems = {}
    for s in network.species:
        A = ((1. / dt + network.degradation(s)) * M1
             + network.diffusion(s) * K1).tocsr()
        systems[s] = (A, _factorize(A), M0 @ old[s] / dt)

    residual = np.inf
    for it in range(1, config.picard_max_iters + 1):
        residual = 0.
        for s in network.species:
            A, lu, rhs = systems[s]
            load = _load_vector(mesh_next,
                                _element_values(network, mesh_next, conc)[s])
            new = _solve(lu, A, rhs + load, config.linear_solver_tol, s)
            change = np.abs(new - conc[s]).max() / max(np.abs(new).max(), 1.)
            residual = max(residual, change)
            conc[s] = new
        logging.debug("Picard iteration %d: fixed point residual %.3g"
                      % (it, residual))
        if network.is_linear or residual <= config.picard_tol:
            break
    else:
        raise SolverError("Picard iteration did not converge in %d "
                          "iterations (fixed point residual %.3g > %g)"
                          % (config.picard_max_iters, residual,
                             config.picard_tol))

    low = min(float(c.min()) for c in conc.values())
    if low < -utils.NEGATIVE_TOLERANCE:
        logging.warning("Minimum nodal concentration %.3g at t=%g"
                        % (low, state.time + dt))
    return SolverState(conc, state.time + dt, mesh_next)
