import logging.config
import os
from typing import List, Optional, Type

import yaml
from injector import Injector, Module

from .app_config import (
    ApplicationConfig,
    ApplicationConfigInjectorModule,
)


def get_app_injector_modules() -> List[Type[Module]]:
    return [
        ApplicationConfigInjectorModule,
    ]


def create_app_injector() -> Injector:
    return Injector(modules=get_app_injector_modules())


def configure_logging(config: ApplicationConfig, level: Optional[str] = None):
    """
    Loads the dictConfig in settings/logging.yml. Falls back to a plain
    basicConfig when the file is missing, so the command line still logs
    something useful.
    """
    path = config.logging_config_path
    if os.path.exists(path):
        with open(path) as f:
            logging.config.dictConfig(yaml.safe_load(f))
    else:
        logging.basicConfig(level=logging.INFO)
        logging.getLogger(__name__).warning(
            f"No logging configuration at {path}; using defaults"
        )
    if level:
        logging.getLogger("decoupled_renewal").setLevel(level.upper())
