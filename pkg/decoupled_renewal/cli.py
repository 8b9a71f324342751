"""
Command line front end: one subcommand per study.

    decoupled-renewal forrester --out forrester.csv
    decoupled-renewal convergence-t22 --config t22.yml --threads 4 --budget-seconds 600

Exit codes: 0 ok, 1 configuration or usage error, 2 numerical failure,
violated hypothesis or exceeded budget (a partial CSV is still written).
"""
import argparse
import logging
import sys
from typing import List, NoReturn, Optional

import yaml
from pydantic import ValidationError

from decoupled_renewal.app import configure_logging, create_app_injector
from decoupled_renewal.app_config import ApplicationConfig
from decoupled_renewal.errors import ConfigurationError, RenewalError
from decoupled_renewal.models.enum import ExitStatus, StudyName
from decoupled_renewal.services.experiments import ExperimentService

logger = logging.getLogger("decoupled_renewal.cli")


class UsageError(Exception):
    pass


class ArgumentParser(argparse.ArgumentParser):
    """argparse exits with status 2 on usage errors; here that status means a numerical failure."""

    def error(self, message: str) -> NoReturn:
        raise UsageError(f"{self.prog}: error: {message}")


def unsigned_64(text: str) -> int:
    value = int(text)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError(f"seed must lie in [0, 2^64), got {text}")
    return value


def build_parser() -> ArgumentParser:
    parser = ArgumentParser(
        prog="decoupled-renewal",
        description="Local large deviation studies for decoupled renewal processes.",
    )
    parser.add_argument("--log-level", default=None, help="Overrides the decoupled_renewal log level.")
    studies = parser.add_subparsers(dest="study", metavar="STUDY", parser_class=ArgumentParser)
    studies.required = True
    for study in StudyName:
        subparser = studies.add_parser(study.value, help=f"Run the {study.value} study.")
        subparser.add_argument("--config", metavar="PATH", help="YAML file layered over the study preset.")
        subparser.add_argument("--out", metavar="PATH", dest="output", help="CSV destination.")
        subparser.add_argument("--seed", metavar="U64", type=unsigned_64)
        subparser.add_argument("--threads", metavar="N", type=int)
        subparser.add_argument("--budget-seconds", metavar="N", type=float, dest="budget_seconds")
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except UsageError as e:
        print(e, file=sys.stderr)
        return ExitStatus.configuration_error.value

    injector = create_app_injector()
    configure_logging(injector.get(ApplicationConfig), args.log_level)
    service = injector.get(ExperimentService)
    study = StudyName(args.study)

    try:
        config = service.build_config(
            study,
            config_path=args.config,
            overrides={
                "output": args.output,
                "seed": args.seed,
                "threads": args.threads,
                "budget_seconds": args.budget_seconds,
            },
        )
    except (ValidationError, ConfigurationError, yaml.YAMLError) as e:
        logger.error(f"Invalid configuration for {study.value}: {e}")
        return ExitStatus.configuration_error.value

    try:
        service.execute(config)
    except RenewalError as e:
        logger.exception(f"{study.value} failed: {e}")
        return ExitStatus.numerical_failure.value
    return ExitStatus.ok.value


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
