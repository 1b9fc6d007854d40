"""
Command router
Decorator-registered CLI commands, mounted onto argparse subparsers by
``include_router`` in app.main.
"""
import argparse
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Sequence, Tuple

Handler = Callable[[argparse.Namespace], int]


@dataclass(frozen=True)
class Option:
    """One command-line flag; keyword arguments go straight to add_argument."""

    flags: Tuple[str, ...]
    kwargs: Dict[str, Any] = field(default_factory=dict)

    @classmethod
    def of(cls, *flags: str, **kwargs: Any) -> "Option":
        return cls(flags=flags, kwargs=kwargs)


@dataclass
class Command:
    name: str
    handler: Handler
    help: str
    options: List[Option]


class CommandRouter:
    def __init__(self):
        self.commands: List[Command] = []

    def command(self, name: str, *, help: str = "", options: Sequence[Option] = ()):
        def decorator(handler: Handler) -> Handler:
            doc = (handler.__doc__ or "").strip()
            summary = help or (doc.splitlines()[0] if doc else "")
            self.commands.append(Command(name, handler, summary, list(options)))
            return handler
        return decorator

    def mount(self, subparsers) -> None:
        for command in self.commands:
            parser = subparsers.add_parser(command.name, help=command.help, description=command.help)
            for option in command.options:
                parser.add_argument(*option.flags, **option.kwargs)
            parser.set_defaults(handler=command.handler, command=command.name)
