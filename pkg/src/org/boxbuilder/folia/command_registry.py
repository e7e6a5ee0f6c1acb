from typing import Callable, Dict

from org.boxbuilder.folia.models.job_config import JobConfig

CommandFunction = Callable[[JobConfig], object]

REGISTRY: Dict[str, CommandFunction] = {

}


def register(name: str) -> Callable[[CommandFunction], CommandFunction]:
    """Decorator adding a command implementation to ``REGISTRY`` under ``name``."""

    def decorator(function: CommandFunction) -> CommandFunction:
        if name in REGISTRY:
            raise ValueError(f"Command {name!r} is registered twice.")
        REGISTRY[name] = function
        return function

    return decorator
