"""Dyadic systems, Haar expansions, paraproducts and T(1)-type testing on
finite nonhomogeneous product spaces, with a Carleson-measure application on
the bidisc."""

try:
    from ._core import *  # noqa: F401,F403  (installed package layout)
except ImportError:  # pragma: no cover - build-tree layout used by ctest
    from _core import *  # noqa: F401,F403

__version__ = "0.1.0"
