"""
This module defines the device file read by every CLI subcommand and turns it into library objects.

A device file is one JSON or YAML document. Frequencies and rates are in GHz (the /2π values quoted for fabricated
devices) and are converted to rad/s here; ring and mode labels are 1-based here and 0-based in the library.

    array:       rings, couplings [i, j, u_ghz] or a rectangular lattice, waveguides, kappa_int_ghz
    modulation:  per-ring signs and tones {amplitude_ghz, omega_d_ghz (optional, resolved from the pattern), phase}
    input:       input modes and waveguide side
    sweep:       eps_min_ghz, eps_max_ghz, samples
    compose:     kind (cascade | phase_shifter | mach_zehnder), mu, phi1 and the stage list

Classes:
    DeviceFile (+ section models)

Functions:
    load_device_file()
    build_device_array()
    build_modspec()
    normalized_document()
"""


# Standard Library Imports
import logging
from typing import List, Literal, Optional, Tuple

# Third-Party Library Imports
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

# Local Application/Library-Specific Imports
from modules.core.configs import cli_settings
from modules.core.errors import DeviceFileError
from modules.core.utils import ghz_to_rad, load_document, rad_to_ghz
from modules.network.modulation import ModulationSpec, Tone, pattern_from_signs, rectangular_pattern_signs, required_tones
from modules.network.resonator_graph import Waveguide, build_array, rectangular_connectivity


class _Section(BaseModel):
    model_config = ConfigDict(extra='forbid')


class LatticeSpec(_Section):
    rows: int = Field(ge=1)
    columns: int = Field(ge=1)
    u_ghz: float = Field(gt=0)
    v_ghz: float = Field(gt=0)


class WaveguideSpec(_Section):
    node: int = Field(default=1, ge=1)
    gamma_ghz: float = Field(ge=0)
    side: Literal['L', 'R'] = 'L'


class ArraySpec(_Section):
    n: Optional[int] = Field(default=None, ge=1)
    omega0_ghz: float = 0.0
    couplings: List[Tuple[int, int, float]] = Field(default_factory=list)
    lattice: Optional[LatticeSpec] = None
    waveguides: List[WaveguideSpec] = Field(default_factory=list)
    kappa_int_ghz: float = Field(default=0.0, ge=0)

    @model_validator(mode='after')
    def _one_topology(self):
        if self.lattice is None and self.n is None:
            raise ValueError("array needs either n with couplings or a lattice")
        if self.lattice is not None and self.couplings:
            raise ValueError("give couplings or a lattice, not both")
        return self

    @property
    def size(self):
        return self.lattice.rows * self.lattice.columns if self.lattice else self.n


class ToneSpec(_Section):
    amplitude_ghz: float = Field(default=0.0, ge=0)
    omega_d_ghz: Optional[float] = Field(default=None, gt=0)
    phase: float = 0.0


class ModulationSection(_Section):
    signs: Optional[List[int]] = None
    pattern: Optional[Literal['P1', 'P2', 'P3']] = None
    tones: List[ToneSpec] = Field(default_factory=list)


class InputSpec(_Section):
    modes: List[int] = Field(default_factory=lambda: [1])
    side: Literal['L', 'R'] = 'L'


class SweepSpec(_Section):
    eps_min_ghz: float = Field(default=0.0, ge=0)
    eps_max_ghz: float = Field(gt=0)
    samples: int = Field(default=cli_settings['default_samples'], ge=2)


class StageSpec(_Section):
    gamma_ghz: float = Field(ge=0)
    kappa_int_ghz: float = Field(default=0.0, ge=0)
    eps_ghz: Optional[float] = Field(default=None, ge=0)
    phase: float = 0.0


class ComposeSpec(_Section):
    kind: Literal['cascade', 'phase_shifter', 'mach_zehnder'] = 'cascade'
    mu: float = 0.0
    phi1: float = 0.0
    stages: List[StageSpec] = Field(min_length=1)


class DeviceFile(_Section):
    name: Optional[str] = None
    array: ArraySpec
    modulation: Optional[ModulationSection] = None
    input: InputSpec = Field(default_factory=InputSpec)
    sweep: Optional[SweepSpec] = None
    compose: Optional[ComposeSpec] = None


# Helper function to turn a pydantic error into the first failing field path
def _field_path(error):
    first = error.errors()[0]
    return '.'.join(str(part) for part in first['loc']), first['msg']


def load_device_file(file_path):
    document = load_document(file_path)
    if not isinstance(document, dict):
        raise DeviceFileError(f"{file_path}: top level must be a mapping")
    try:
        device = DeviceFile.model_validate(document)
    except ValidationError as error:
        field, message = _field_path(error)
        raise DeviceFileError(f"{file_path}: {field}: {message}", field=field) from error
    logging.debug(f"[load_device_file] loaded {device.name or file_path}")
    return device


def build_device_array(device):
    spec = device.array
    if spec.lattice is not None:
        lattice = spec.lattice
        weights = {'u': ghz_to_rad(lattice.u_ghz), 'v': ghz_to_rad(lattice.v_ghz)}
        couplings = [(i, j, weights[label]) for i, j, label in rectangular_connectivity(lattice.rows, lattice.columns)]
    else:
        couplings = [(i - 1, j - 1, ghz_to_rad(u)) for i, j, u in spec.couplings]

    waveguides = [Waveguide(guide.node - 1, ghz_to_rad(guide.gamma_ghz), guide.side) for guide in spec.waveguides]
    return build_array(spec.size, ghz_to_rad(spec.omega0_ghz), couplings, waveguides, ghz_to_rad(spec.kappa_int_ghz))


def device_signs(device):
    section = device.modulation
    if section is None:
        return None
    if section.pattern is not None:
        lattice = device.array.lattice
        if lattice is None:
            raise DeviceFileError("named patterns need a lattice section; give explicit signs otherwise", field='modulation.pattern')
        return rectangular_pattern_signs(lattice.rows, lattice.columns, section.pattern)
    if section.signs is None:
        raise DeviceFileError("modulation needs signs or a pattern", field='modulation.signs')
    return tuple(section.signs)


def build_modspec(device, basis, amplitude=None):
    """
    ModulationSpec for the device; tones without omega_d are set to the pattern splittings in ascending order.
    amplitude (rad/s) overrides every tone amplitude.
    """
    signs = device_signs(device)
    if signs is None:
        return None

    section = device.modulation
    splittings = ()
    if any(tone.omega_d_ghz is None for tone in section.tones) or not section.tones:
        splittings = required_tones(pattern_from_signs(basis, signs), basis.frequencies).splittings

    specs = section.tones or [ToneSpec() for _ in splittings]
    tones = []
    for index, spec in enumerate(specs):
        if spec.omega_d_ghz is not None:
            frequency = ghz_to_rad(spec.omega_d_ghz)
        elif index < len(splittings):
            frequency = splittings[index]
        else:
            raise DeviceFileError(f"tone {index + 1} has no omega_d_ghz and the pattern needs only {len(splittings)} tones", field=f"modulation.tones.{index}")
        value = ghz_to_rad(spec.amplitude_ghz) if amplitude is None else amplitude
        tones.append(Tone(value, frequency, spec.phase))
    return ModulationSpec(tuple(signs), tuple(tones))


def normalized_document(device, basis=None):
    """
    The device file with every default filled in and tone frequencies resolved, as plain JSON values.
    """
    document = device.model_dump(mode='json')
    if device.modulation is not None and basis is not None:
        modspec = build_modspec(device, basis)
        specs = device.modulation.tones or [ToneSpec() for _ in modspec.tones]
        document['modulation']['tones'] = [
            {'amplitude_ghz': spec.amplitude_ghz, 'omega_d_ghz': spec.omega_d_ghz or rad_to_ghz(tone.frequency), 'phase': spec.phase}
            for spec, tone in zip(specs, modspec.tones)
        ]
    return document
