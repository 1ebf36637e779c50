# subbary package initialization
from .services.convex_body import ConvexBodyKernel
from .services.profile_engine import ProfileEngine
from .services.invariants import InvariantCalculator
from .services.eckardt import EckardtExample
from .services.verifier import PropertyVerifier

__version__ = "0.3.0"

__all__ = [
    'ConvexBodyKernel',
    'ProfileEngine',
    'InvariantCalculator',
    'EckardtExample',
    'PropertyVerifier',
]
