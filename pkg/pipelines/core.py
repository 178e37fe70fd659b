from abc import abstractmethod
import collections
import logging

import numpy as np
from scipy.interpolate import LinearNDInterpolator, NearestNDInterpolator

import geometry
import mesh as mesh_module
import solver
import utils
from displacement import KEYING_PARAMETER
from solver import SolverConfig, SolverState
from utils import Observable, MESSAGE_TYPE_STAGE_START, MESSAGE_TYPE_STEP, \
    MESSAGE_TYPE_STAGE_END, EPS_INT, DisplacementError


StageStart = collections.namedtuple(
    'StageStart', ['stage', 'mesh', 'target_areas_t', 'target_areas_t1',
                   'junction_targets', 'state', 'network', 'time_start',
                   'time_end'])
"""Broadcast once the reference mesh of a stage exists. """


StepRecord = collections.namedtuple(
    'StepRecord', ['stage', 'step', 'time', 'fraction', 'state', 'areas',
                   'quality', 'production', 'network'])
"""Diagnostics after one time step. ``step`` and ``time`` count from the
start of the first stage, ``production`` holds the domain integrated
effective production per species.
"""


class StageResult(object):
    """Everything a stage run produced.

    Attributes:
        stage (int): Stage index within the sequence
        mode (string): Pipeline name
        records (list): ``StepRecord`` per step, including the initial
                        state of the first stage as step 0
        target_areas_t (OrderedDict): Shoelace areas at stage t
        target_areas_t1 (OrderedDict): Shoelace areas at stage t+1
        junction_targets (OrderedDict): Junction key -> stage-(t+1) point
        junction_errors (OrderedDict): Junction key -> distance of the
                                       junction node from its target at
                                       the end of the stage
        reference_mesh (Mesh): Triangulation of stage t
        final_state (SolverState): State at the end of the stage
        final_production (dict): Species -> nodal production at the end
    """

    def __init__(self, stage, mode, reference_mesh, target_areas_t,
                 target_areas_t1, junction_targets):
        self.stage = stage
        self.mode = mode
        self.reference_mesh = reference_mesh
        self.target_areas_t = target_areas_t
        self.target_areas_t1 = target_areas_t1
        self.junction_targets = junction_targets
        self.records = []
        self.junction_errors = collections.OrderedDict()
        self.final_state = None
        self.final_production = None

    @property
    def final_mesh(self):
        return self.final_state.mesh

    @property
    def areas(self):
        return [r.areas for r in self.records]

    @property
    def quality(self):
        return [r.quality for r in self.records]

    @property
    def production(self):
        return [r.production for r in self.records]

    @property
    def min_quality(self):
        return min(r.quality.min_quality for r in self.records)

    @property
    def inverted_steps(self):
        """Steps with at least one inverted element. """
        return [r.step for r in self.records if r.quality.inverted_count]

    def area_errors(self):
        """Relative deviation of the final labeled areas from the
        stage-(t+1) shoelace areas, per subdomain and total.
        """
        final = self.records[-1].areas
        return collections.OrderedDict(
            (sid, abs(final[sid] - target) / target)
            for sid, target in self.target_areas_t1.items())

    @property
    def max_area_error(self):
        return max(v for k, v in self.area_errors().items() if k != 'total')

    @property
    def max_junction_error(self):
        return max(self.junction_errors.values()) if self.junction_errors \
            else 0.

    def __repr__(self):
        return "StageResult(%s stage %d, %d steps, min quality %.4g)" % (
            self.mode, self.stage, len(self.records), self.min_quality)


def transfer_state(state, mesh, network):
    """Interpolates a state onto a new mesh of the same domain. Nodes
    of the new mesh outside the old one take the value of the closest
    old node. Each species is rescaled afterwards so that its total
    mass is unchanged.

    Args:
        state (SolverState): State on the old mesh
        mesh (Mesh): Target mesh
        network (ReactionNetwork): Defines the species

    Returns:
        SolverState. State on ``mesh`` at time 0
    """
    old = state.mesh.nodes
    conc = {}
    for s in network.species:
        values = state.concentrations[s]
        new = LinearNDInterpolator(old, values)(mesh.nodes)
        missing = np.isnan(new)
        if np.any(missing):
            new[missing] = NearestNDInterpolator(old, values)(
                mesh.nodes[missing])
        before = solver.total_mass(state.mesh, values)
        after = solver.total_mass(mesh, new)
        if after > 0. and before > 0.:
            new *= before / after
        conc[s] = new
    logging.debug("Transferred state from %d to %d nodes"
                  % (state.mesh.n_nodes, mesh.n_nodes))
    return SolverState(conc, 0., mesh)


class StagePipeline(Observable):
    """A stage pipeline takes the geometry of two consecutive stages,
    builds the displacement fields which map the curves of stage t onto
    stage t+1, triangulates stage t, and integrates the reaction
    network while the mesh is ramped linearly towards stage t+1.

    Subclasses decide how displacement fields are built from the
    segmented geometries. Pipelines are observable: they broadcast
    ``StageStart``, ``StepRecord`` and ``StageResult`` messages.
    """

    def __init__(self, network, config=None, n_points=utils.DEFAULT_N_POINTS,
                 keying=KEYING_PARAMETER, target_edge_length=None,
                 start_pairs=None, tol=EPS_INT):
        """Creates a pipeline.

        Args:
            network (ReactionNetwork): Reaction network to integrate
            config (SolverConfig): Time stepping settings
            n_points (int): Rows per displacement field
            keying (string): Displacement keying
            target_edge_length (float): Mesh size, None for the default
            start_pairs (dict): Closed curve id -> (start_t, start_t1)
            tol (float): Intersection tolerance
        """
        super(StagePipeline, self).__init__()
        self.network = network
        self.config = config or SolverConfig()
        self.n_points = n_points
        self.keying = keying
        self.target_edge_length = target_edge_length
        self.start_pairs = start_pairs or {}
        self.tol = tol

    def start_pair(self, curve_id):
        """Start point pair of a closed curve.

        Raises:
            DisplacementError. If no pair is configured
        """
        if curve_id not in self.start_pairs:
            raise DisplacementError("Closed curve '%s' needs a start point "
                                    "pair (geometry.start_pairs)" % curve_id)
        return self.start_pairs[curve_id]

    @abstractmethod
    def build_fields(self, seg_t, seg_t1):
        """Builds the displacement fields of a stage pair.

        Args:
            seg_t (StagedGeometry): Segmented stage t
            seg_t1 (StagedGeometry): Segmented stage t+1

        Returns:
            list. ``DisplacementField`` instances which cover every
            segment of stage t exactly once
        """
        raise NotImplementedError

    def segment(self, geo_t, geo_t1):
        """Segments both stages and checks that their topology agrees. """
        seg_t = geometry.segment_at_intersections(geo_t, self.tol)
        seg_t1 = geometry.segment_at_intersections(geo_t1, self.tol)
        geometry.check_topology(seg_t, seg_t1)
        return seg_t, seg_t1

    def _record(self, stage, step, time, fraction, state, quality):
        rec = StepRecord(stage, step, time, fraction, state,
                         state.mesh.labeled_areas(), quality,
                         solver.integrated_production(
                             self.network, state.mesh, state.concentrations),
                         self.network)
        self.notify_observers(rec, MESSAGE_TYPE_STEP)
        return rec

    def run(self, geo_t, geo_t1, state=None, stage=0, step_offset=0,
            time_offset=0.):
        """Runs one stage.

        Args:
            geo_t (StagedGeometry): Geometry at stage t
            geo_t1 (StagedGeometry): Geometry at stage t+1
            state (SolverState): State from the previous stage on its
                                 final mesh, or None to start from the
                                 network's initial conditions
            stage (int): Stage index
            step_offset (int): Steps done in earlier stages
            time_offset (float): Time spent in earlier stages

        Returns:
            StageResult. Diagnostics of the stage

        Raises:
            SimulationError. Propagated from the pipeline parts
        """
        seg_t, seg_t1 = self.segment(geo_t, geo_t1)
        self.network.bind(seg_t.subdomain_ids)
        fields = self.build_fields(seg_t, seg_t1)
        logging.info("Stage %d (%s): %d displacement fields"
                     % (stage, self.name, len(fields)))
        ref = mesh_module.triangulate(seg_t, self.target_edge_length)
        initial = state is None
        if initial:
            state = SolverState(self.network.initial_conditions(ref), 0., ref)
        else:
            state = transfer_state(state, ref, self.network)
        result = StageResult(stage, self.name, ref,
                             geometry.subdomain_areas(seg_t),
                             geometry.subdomain_areas(seg_t1),
                             seg_t1.junction_keys())
        self.notify_observers(StageStart(stage, ref, result.target_areas_t,
                                         result.target_areas_t1,
                                         result.junction_targets, state,
                                         self.network, time_offset,
                                         time_offset + self.config.t_end),
                              MESSAGE_TYPE_STAGE_START)
        if initial:
            result.records.append(self._record(
                stage, step_offset, time_offset, 0., state,
                mesh_module.quality_report(ref)))

        cfg = self.config
        prev = 0.
        for k, t in enumerate(cfg.step_times()):
            fraction = t / cfg.t_end
            moved = mesh_module.move_mesh(ref, fields, fraction,
                                          cfg.strict_mesh, self.tol)
            quality = mesh_module.quality_report(moved)
            if quality.inverted_count:
                logging.warning("Stage %d, t=%g: %d inverted elements (min "
                                "quality %.3g)" % (stage, t,
                                                   quality.inverted_count,
                                                   quality.min_quality))
            state = solver.step(state, moved, t - prev, self.network, cfg)
            prev = t
            step_no = step_offset + k + 1
            rec = self._record(stage, step_no, time_offset + t, fraction,
                               state, quality)
            result.records.append(rec)
            if step_no % 10 == 0:
                logging.debug("Step %d: min quality %.4g, total area %.6g"
                              % (step_no, quality.min_quality,
                                 rec.areas['total']))

        final = state.mesh
        for key, node in ref.junction_nodes.items():
            target = np.asarray(result.junction_targets[key])
            result.junction_errors[key] = float(
                np.hypot(*(final.nodes[node] - target)))
        result.final_state = state
        result.final_production = solver.nodal_production(
            self.network, final, state.concentrations)
        logging.info("Stage %d done: min quality %.4g, %d steps with "
                     "inverted elements, max junction error %.3g"
                     % (stage, result.min_quality,
                        len(result.inverted_steps),
                        result.max_junction_error))
        self.notify_observers(result, MESSAGE_TYPE_STAGE_END)
        return result
