"""sdohkit: social-determinants-of-health event annotation toolkit."""

from .constants import TOOLKIT_VERSION

__version__ = TOOLKIT_VERSION
__all__ = ["__version__"]
