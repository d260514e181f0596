"""nlcmd: a rule-based natural-language command engine.

Free-form imperative sentences become structured command frames (action,
primary object, optional secondary object, conditions) and run against
pluggable application adapters, with interactive failure recovery and
loadable extension suits.
"""

from .config import EngineConfig, default_config
from .errors import EngineError
from .explainer import CommandFrame
from .session import EngineRuntime, Session, trace_to_json

__version__ = "0.1.0"

__all__ = [
    "CommandFrame",
    "EngineConfig",
    "EngineError",
    "EngineRuntime",
    "Session",
    "default_config",
    "trace_to_json",
    "__version__",
]
