"""Shipped example deformations with known-bulk reference points.

Each case names a spec JSON under ginlab/specs plus a reference point
deep in the bulk and a small box of bulk points used by the check
suite.  The trio covers the undeformed ensemble, a symmetric two-atom
deformation whose support splits into two lobes, and an asymmetric
three-atom case that also exercises the probe and finite blocks.
"""

from dataclasses import dataclass
from importlib import resources

import json

from .config import spec_from_json_dict
from .model import DeformationSpec


@dataclass(frozen=True)
class ShippedCase:
    name: str
    spec: DeformationSpec
    z0: complex
    bulk_box: tuple         # (xmin, xmax, ymin, ymax) contained in the bulk
    description: str


def _load_spec(name: str) -> DeformationSpec:
    text = resources.files("ginlab").joinpath(f"specs/{name}.json").read_text()
    return spec_from_json_dict(json.loads(text))


def shipped_cases() -> tuple:
    """All shipped example cases, in a fixed order."""
    return (
        ShippedCase(
            name="pure_ginibre",
            spec=_load_spec("pure_ginibre"),
            z0=0.3 + 0.0j,
            bulk_box=(-0.4, 0.4, -0.4, 0.4),
            description="Undeformed ensemble; support is the unit disk.",
        ),
        ShippedCase(
            name="two_atom_symmetric",
            spec=_load_spec("two_atom_symmetric"),
            z0=0.0 + 0.0j,
            bulk_box=(-0.3, 0.3, -0.3, 0.3),
            description="Atoms at +-1 with equal weight, tau = 2; the "
                        "origin sits between the two spectral lobes.",
        ),
        ShippedCase(
            name="three_atom_mixed",
            spec=_load_spec("three_atom_mixed"),
            z0=0.2 + 0.1j,
            bulk_box=(0.1, 0.3, 0.02, 0.22),
            description="Asymmetric weights, a probe block and a fixed "
                        "finite block on top of the zero padding.",
        ),
    )


def get_case(name: str) -> ShippedCase:
    for case in shipped_cases():
        if case.name == name:
            return case
    raise KeyError(f"no shipped case named {name!r}; "
                   f"known: {[c.name for c in shipped_cases()]}")
