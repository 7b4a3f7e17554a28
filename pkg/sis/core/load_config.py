from __future__ import annotations

import json
from os import listdir
from os.path import abspath
from os.path import dirname
from os.path import isfile
from typing import Any

import jsonschema

from sis.core.exception.exception import ConfigNotFoundException
from sis.core.exception.exception import ConfigValidationException
from sis.core.model.coherent import DEFAULT_NMAX
from sis.core.model.family import FamilyConfig
from sis.core.model.functional import ZSpec
from sis.core.model.functional import ZVariant

''' File path to 'configs' directory '''
CONFIGS_DIR = dirname(abspath(__file__)) + '/../../resources/configs/'

''' Extension of config files '''
CONFIG_EXTENSION = '.json'

''' Default relative tolerance of verification runs '''
DEFAULT_TOL = 1e-8

''' Family names accepted by the schema; deferred kinds are rejected later '''
FAMILY_KIND_NAMES = [
    'typeA', 'typeB', 'typeC', 'typeD', 'typeE', 'typeF', 'selfSimilar'
]

FAMILY_SCHEMA: dict[str, Any] = {
    'type': 'object',
    'properties': {
        'kind': {'enum': FAMILY_KIND_NAMES},
        'a1': {'type': 'number'},
        'beta': {'type': 'number'},
        'gamma': {'type': 'number'},
        'delta': {'type': 'number'},
        'lambda': {'type': 'number'},
        'q': {'type': ['number', 'null']},
        'r_scale': {'type': ['number', 'null']},
    },
    'required': ['kind'],
    'additionalProperties': False,
}

ZSPEC_SCHEMA: dict[str, Any] = {
    'type': 'object',
    'properties': {
        'variant': {'enum': [variant.value for variant in ZVariant]},
        'c': {'type': 'number'},
        'sigma': {'type': 'number'},
    },
    'required': ['variant'],
    'additionalProperties': False,
}

RUN_SCHEMA: dict[str, Any] = {
    'type': 'object',
    'properties': {
        'family': FAMILY_SCHEMA,
        'zspec': ZSPEC_SCHEMA,
        'z': {
            'type': 'array',
            'items': {'type': 'number'},
            'minItems': 2,
            'maxItems': 2,
        },
        'alpha': {'type': 'number'},
        'nmax': {'type': 'integer', 'minimum': 1},
        'tol': {'type': 'number', 'exclusiveMinimum': 0},
        'output': {'enum': ['json', 'csv']},
        'out_path': {'type': ['string', 'null']},
    },
    'required': ['family'],
    'additionalProperties': False,
}


class RunConfig:
    """
    Validated run configuration: family, functional, label and output
     settings.
    """

    def __init__(
            self, family: FamilyConfig, zspec: ZSpec, z: complex = 0j,
            nmax: int = DEFAULT_NMAX, tol: float = DEFAULT_TOL,
            output: str = 'json', out_path: str | None = None
    ):
        """
        Initialize an instance of RunConfig.

        :param family: Family
        :type family: FamilyConfig
        :param zspec: Functional, carrying alpha
        :type zspec: ZSpec
        :param z: Coherent-state label
        :type z: complex
        :param nmax: Initial truncation
        :type nmax: int
        :param tol: Relative tolerance of verification runs
        :type tol: float
        :param output: Output format, json or csv
        :type output: str
        :param out_path: File to write output to, stdout when None
        :type out_path: str | None
        """
        self._family: FamilyConfig = family
        self._zspec: ZSpec = zspec
        self._z: complex = complex(z)
        self._nmax: int = nmax
        self._tol: float = tol
        self._output: str = output
        self._out_path: str | None = out_path

    @property
    def family(self) -> FamilyConfig:
        return self._family

    @property
    def zspec(self) -> ZSpec:
        return self._zspec

    @property
    def z(self) -> complex:
        return self._z

    @property
    def alpha(self) -> float:
        return self._zspec.alpha

    @property
    def nmax(self) -> int:
        return self._nmax

    @property
    def tol(self) -> float:
        return self._tol

    @property
    def output(self) -> str:
        return self._output

    @property
    def out_path(self) -> str | None:
        return self._out_path

    def to_dict(self) -> dict[str, Any]:
        data: dict[str, Any] = {
            'family': self._family.to_dict(),
            'zspec': self._zspec.to_dict(),
            'z': [self._z.real, self._z.imag],
            'alpha': self._zspec.alpha,
            'nmax': self._nmax,
            'tol': self._tol,
            'output': self._output,
        }
        if self._out_path is not None:
            data['out_path'] = self._out_path
        return data


def validate_run_document(document: Any) -> None:
    """
    Validate a run document against RUN_SCHEMA.

    :param document: Parsed JSON document
    :type document: Any
    """
    try:
        jsonschema.validate(instance=document, schema=RUN_SCHEMA)
    except jsonschema.ValidationError as error:
        location = '/'.join(str(part) for part in error.absolute_path) or 'root'
        raise ConfigValidationException(
            f'\nError: Config is invalid at {location}: {error.message}'
        )


def run_config_from_dict(
        document: dict[str, Any], defaults: dict[str, Any] | None = None
) -> RunConfig:
    """
    Build a RunConfig from a run document, or from a state dump carrying one
     under 'run'.

    :param document: Run document
    :type document: dict[str, Any]
    :param defaults: Values for run keys the document leaves out
    :type defaults: dict[str, Any] | None
    :return: Run configuration
    :rtype: RunConfig
    """
    if isinstance(document, dict) and 'run' in document:
        document = document['run']
    validate_run_document(document)
    merged: dict[str, Any] = {
        'z': [0.0, 0.0], 'alpha': 0.0, 'nmax': DEFAULT_NMAX, 'tol': DEFAULT_TOL,
        'output': 'json', 'out_path': None, 'zspec': {'variant': 'const'},
    }
    merged.update(defaults or {})
    merged.update(document)
    re, im = merged['z']
    return RunConfig(
        FamilyConfig.from_dict(merged['family']),
        ZSpec.from_dict(merged['zspec'], merged['alpha']),
        complex(re, im),
        merged['nmax'],
        merged['tol'],
        merged['output'],
        merged['out_path'],
    )


def available_configs() -> list[str]:
    """
    Names of the configs shipped in the 'configs' directory.

    :return: Config names without extension
    :rtype: list[str]
    """
    return sorted(
        name.partition(CONFIG_EXTENSION)[0]
        for name in listdir(CONFIGS_DIR)
        if name.endswith(CONFIG_EXTENSION)
    )


def load_run_config(
        name_or_path: str, defaults: dict[str, Any] | None = None
) -> RunConfig:
    """
    Loads a run config

    :param name_or_path: Path to a JSON file, or the name of a config inside
     the 'configs' directory
    :type name_or_path: str
    :param defaults: Values for run keys the config leaves out
    :type defaults: dict[str, Any] | None
    :return: The validated run configuration
    :rtype: RunConfig
    """
    file_path = name_or_path
    if not isfile(file_path):
        file_path = CONFIGS_DIR + name_or_path
        if not file_path.endswith(CONFIG_EXTENSION):
            file_path += CONFIG_EXTENSION
    if not isfile(file_path):
        raise ConfigNotFoundException(
            f'\nError: The config {name_or_path} is neither a file nor one of'
            f' {available_configs()}.'
        )

    try:
        with open(file_path) as json_file:
            document = json.load(json_file)
    except (json.JSONDecodeError, UnicodeDecodeError) as error:
        raise ConfigValidationException(
            f'\nError: The file {file_path} is not valid JSON: {error}'
        )

    return run_config_from_dict(document, defaults)
