import argparse
import json
import logging
import re
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, TextIO, Tuple

from utils.errors import DynamicsError, IncompletenessError, InputError

logger = logging.getLogger(__name__)

# Exit codes
EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_INPUT = 2
EXIT_INCOMPLETE = 3

# Tokens such as "-29/16" or "-3" are values, not flags
NEGATIVE_NUMBER = re.compile(r"^-\d+(/\d+)?$|^-\d*\.\d+$")

# A handler returns the JSON payload and the text rendering of its result
Handler = Callable[[argparse.Namespace], Tuple[Dict[str, Any], str]]


@dataclass
class Command:
    name: str
    help: str
    handler: Handler
    arguments: List[Tuple[Tuple[str, ...], Dict[str, Any]]] = field(default_factory=list)


def argument(*flags: str, **kwargs) -> Tuple[Tuple[str, ...], Dict[str, Any]]:
    """Argument definition for Router.command, same signature as add_argument"""
    return flags, kwargs


def exit_code_for(error: Exception) -> int:
    if isinstance(error, InputError):
        return EXIT_INPUT
    if isinstance(error, IncompletenessError):
        return EXIT_INCOMPLETE
    return EXIT_FAILURE


class Router:
    """Registry of subcommands, filled by the @router.command decorator"""

    def __init__(self):
        self.commands: Dict[str, Command] = {}

    def command(self, name: str, help: str, *arguments):
        """
        Registers a handler for a subcommand

        Args:
            name: Subcommand name
            help: One-line description
            arguments: Specs built with argument()
        """

        def decorator(handler: Handler) -> Handler:
            if name in self.commands:
                raise ValueError(f"Command {name!r} is already registered")
            self.commands[name] = Command(name, help, handler, list(arguments))
            return handler

        return decorator

    def include_router(self, other: "Router"):
        for name, command in other.commands.items():
            if name in self.commands:
                raise ValueError(f"Command {name!r} is already registered")
            self.commands[name] = command

    def configure(self, subparsers, parents: Optional[list] = None):
        """Adds one subparser per registered command"""
        for command in self.commands.values():
            parser = subparsers.add_parser(command.name, help=command.help, parents=parents or [])
            parser._negative_number_matcher = NEGATIVE_NUMBER
            for flags, kwargs in command.arguments:
                parser.add_argument(*flags, **kwargs)
            parser.set_defaults(command=command.name)

    def dispatch(self, args: argparse.Namespace, stdout: TextIO, stderr: TextIO) -> int:
        """
        Runs the handler for args.command and writes its output

        Args:
            args: Parsed arguments; args.json selects JSON output
            stdout: Stream for results
            stderr: Stream for one-line diagnostics

        Returns:
            int: Process exit code
        """
        command = self.commands.get(getattr(args, "command", None))
        if command is None:
            stderr.write("error: missing subcommand\n")
            return EXIT_INPUT

        try:
            payload, text = command.handler(args)
        except DynamicsError as e:
            code = exit_code_for(e)
            logger.error(f"{command.name} failed: {e}")
            stderr.write(f"error: {e}\n")
            return code
        except Exception as e:
            logger.critical(f"Unexpected error in {command.name}: {e}", exc_info=True)
            stderr.write(f"error: {e}\n")
            return EXIT_FAILURE

        if getattr(args, "json", False):
            payload = {"command": command.name, **payload}
            stdout.write(json.dumps(payload, sort_keys=True, indent=2) + "\n")
        else:
            stdout.write(text.rstrip("\n") + "\n")
        return EXIT_OK
