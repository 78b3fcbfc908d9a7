"""Valid mod-3 orientations of plane multigraphs.

Instances carry a rotation system, a Z3 prescription, a partial orientation,
specified faces and marked vertices. The package decides and constructs
valid orientations, checks the DTS/3DTS/RST/3RST/FT classes, reduces
instances with the face-preserving operators, and generates the known
families without valid orientations.
"""
from .graph import (
    Instance, InstanceError, NotPlanarError, OrientationError, PrescriptionError,
    build, contract, delete_edge, delete_vertex, lift, residual, verify,
)

__version__ = "0.1.0"
