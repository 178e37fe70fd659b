import os
import inspect
import importlib
import logging

from .core import StagePipeline, StageResult, StepRecord, StageStart, \
    transfer_state
from utils import ConfigError

PIPELINE_REGISTRY = {}

pipelines_dir = os.path.dirname(__file__)
for file in sorted(os.listdir(pipelines_dir)):
    path = os.path.join(pipelines_dir, file)
    if not file.startswith('_') and not file.startswith('.') and file.endswith('.py'):
        model_name = file[:file.find('.py')]
        module = importlib.import_module('pipelines.' + model_name)
        clsmembers = inspect.getmembers(module, inspect.isclass)
        for name, _cls in clsmembers:
            if issubclass(_cls, StagePipeline) and not _cls == StagePipeline:
                if not hasattr(_cls, 'name'):
                    raise ValueError("All pipeline classes must have `name` attribute. Culprit: {}".format(name))
                else:
                    PIPELINE_REGISTRY[_cls.name] = _cls


def create_pipeline(mode, network, config=None, observers=None, **kwargs):
    """Instantiates the pipeline registered as ``mode``.

    Raises:
        ConfigError. If ``mode`` is not registered
    """
    if mode not in PIPELINE_REGISTRY:
        raise ConfigError("unknown mode '%s', use one of %s"
                          % (mode, ", ".join(sorted(PIPELINE_REGISTRY))),
                          path="mode")
    pipeline = PIPELINE_REGISTRY[mode](network, config, **kwargs)
    for observer in observers or []:
        pipeline.add_observer(observer)
    return pipeline


def run_stage(geometry_t, geometry_t1, network, config=None, mode='model2',
              observers=None, **kwargs):
    """Runs one stage pair with the pipeline registered as ``mode``.

    Args:
        geometry_t (StagedGeometry): Geometry at stage t
        geometry_t1 (StagedGeometry): Geometry at stage t+1
        network (ReactionNetwork): Reaction network
        config (SolverConfig): Time stepping settings
        mode (string): ``model1`` or ``model2``
        observers (list): Observers added to the pipeline
        kwargs: Passed through to the pipeline constructor

    Returns:
        StageResult. The stage diagnostics
    """
    pipeline = create_pipeline(mode, network, config, observers, **kwargs)
    return pipeline.run(geometry_t, geometry_t1)


def run_sequence(geometries, network, config=None, mode='model2',
                 observers=None, **kwargs):
    """Runs consecutive stage pairs of a developmental sequence. Each
    stage starts from the state at the end of the previous one,
    transferred onto a fresh triangulation.

    Args:
        geometries (list): ``StagedGeometry`` per stage, at least two
        network (ReactionNetwork): Reaction network
        config (SolverConfig): Time stepping settings, per stage
        mode (string): ``model1`` or ``model2``
        observers (list): Observers added to the pipeline
        kwargs: Passed through to the pipeline constructor

    Returns:
        list. ``StageResult`` per stage pair
    """
    if len(geometries) < 2:
        raise ConfigError("a sequence needs at least two stages, got %d"
                          % len(geometries), path="geometry.stages")
    pipeline = create_pipeline(mode, network, config, observers, **kwargs)
    results = []
    state, steps, time = None, 0, 0.
    for stage, (geo_t, geo_t1) in enumerate(zip(geometries[:-1],
                                                geometries[1:])):
        result = pipeline.run(geo_t, geo_t1, state, stage, steps, time)
        results.append(result)
        state = result.final_state
        steps = result.records[-1].step
        time = result.records[-1].time
    logging.info("Sequence of %d stages done" % len(results))
    return results
