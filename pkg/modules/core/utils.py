"""
This module provides general helper functions for setting up the environment, managing the worker pool, unit conversion and report I/O.

Functions:
    initialize_environment()
    initialize_executors()
    shutdown_executors()
    map_in_executor()

    ghz_to_rad()
    rad_to_ghz()

    load_document()
    write_json()
    to_jsonable()
"""


# Standard Library Imports
import logging
import os
from concurrent.futures import ThreadPoolExecutor

# Third-Party Library Imports
import numpy as np
import orjson
import yaml
from dotenv import load_dotenv
from tqdm import tqdm

# Local Application/Library-Specific Imports
from modules.core import configs
from modules.core.configs import cli_settings
from modules.core.errors import DeviceFileError


# Initialize environment for running any subcommand
def initialize_environment(log_level=None):
    load_dotenv()
    level = (log_level or configs.settings.log_level).upper()
    logging.basicConfig(level=getattr(logging, level, logging.INFO), format='%(asctime)s - %(levelname)s - %(message)s')
    logging.debug("[initialize_environment] Environment initialized.")


def initialize_executors(max_workers=None):
    workers = max_workers or configs.settings.threads
    configs.sweep_executor = ThreadPoolExecutor(max_workers=workers)
    configs.executor_list = [configs.sweep_executor]
    logging.debug(f"[initialize_executors] sweep executor started with {workers} workers")
    return configs.sweep_executor


def shutdown_executors():
    if not configs.executor_list:
        logging.debug("[shutdown_executors] No executor to shut down.")
    for executor in configs.executor_list:
        # Waits for currently running sweep points to complete
        executor.shutdown(wait=True)
        logging.debug(f"[shutdown_executors] {executor} executor shut down.")

    configs.sweep_executor = None
    configs.executor_list = []


# Ordered map over the shared executor; runs inline when no pool was started
def map_in_executor(function, items, description=None):
    items = list(items)
    if configs.sweep_executor is None or len(items) < 2:
        results = map(function, items)
    else:
        results = configs.sweep_executor.map(function, items)
    if description:
        results = tqdm(results, total=len(items), desc=description, leave=False)
    return list(results)


def ghz_to_rad(value_ghz):
    return value_ghz * cli_settings['ghz_to_rad']


def rad_to_ghz(value_rad):
    return value_rad / cli_settings['ghz_to_rad']


# Loads a JSON or YAML device document, keeping the decoder's line number on failure
def load_document(file_path):
    if not os.path.exists(file_path):
        raise DeviceFileError(f"device file not found: {file_path}")

    with open(file_path, 'rb') as file:
        raw = file.read()

    if file_path.endswith(('.yaml', '.yml')):
        try:
            return yaml.safe_load(raw)
        except yaml.YAMLError as error:
            mark = getattr(error, 'problem_mark', None)
            line = mark.line + 1 if mark is not None else None
            raise DeviceFileError(f"invalid YAML in {file_path}: {error}", line=line) from error

    try:
        return orjson.loads(raw)
    except orjson.JSONDecodeError as error:
        raise DeviceFileError(f"invalid JSON in {file_path}: {error.msg}", line=error.lineno) from error


# Converts numpy scalars/arrays and complex numbers into plain JSON values
def to_jsonable(value):
    if isinstance(value, dict):
        return {str(key): to_jsonable(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(item) for item in value]
    if isinstance(value, np.ndarray):
        return to_jsonable(value.tolist())
    if isinstance(value, (complex, np.complexfloating)):
        return {'re': float(np.real(value)), 'im': float(np.imag(value))}
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        value = float(value)
    if isinstance(value, float) and not np.isfinite(value):
        return None if np.isnan(value) else ('inf' if value > 0 else '-inf')
    return value


def write_json(file_path, payload):
    data = orjson.dumps(to_jsonable(payload), option=orjson.OPT_INDENT_2 | orjson.OPT_SORT_KEYS)
    if file_path is None or file_path == '-':
        print(data.decode())
        return
    with open(file_path, 'wb') as file:
        file.write(data)
    logging.info(f"[write_json] report written to {file_path}")
