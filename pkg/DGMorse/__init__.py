"""
DG-Morse toolkit
Exact verification of A∞ modules, coherent chain homotopies, twisted Morse
complexes and the loop coproduct of spherical space forms
"""

from .pipeline import VerificationPipeline
from .config import ToolkitConfig, ProfiledConfig
from .fixture_reader import FixtureReader, load_fixture

__version__ = "1.0.0"
__all__ = ["VerificationPipeline", "ToolkitConfig", "ProfiledConfig", "FixtureReader", "load_fixture"]
