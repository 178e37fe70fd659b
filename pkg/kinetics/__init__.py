import os
import inspect
import importlib
from .core import ReactionNetwork, hill_act, hill_inh

NETWORK_REGISTRY = {}

networks_dir = os.path.dirname(__file__)
for file in sorted(os.listdir(networks_dir)):
    path = os.path.join(networks_dir, file)
    if not file.startswith('_') and not file.startswith('.') and file.endswith('.py'):
        model_name = file[:file.find('.py')]
        module = importlib.import_module('kinetics.' + model_name)
        clsmembers = inspect.getmembers(module, inspect.isclass)
        for name, _cls in clsmembers:
            if issubclass(_cls, ReactionNetwork) and not _cls == ReactionNetwork:
                if not hasattr(_cls, 'name'):
                    raise ValueError("All network classes must have `name` attribute. Culprit: {}".format(name))
                else:
                    NETWORK_REGISTRY[_cls.name] = _cls
