"""Certified out-of-distribution error bounds for learned one-mode
continuous-variable quantum channels.

Given an in-distribution guarantee (output distance <= eps0 on coherent
states of amplitude <= tau), the package constructs rigorous upper bounds on
the output trace distance for coherent states of any energy and for
arbitrary input states, and verifies every bound against brute-force
oracles.
"""

from .coherent_bounds import BoundCurve, InDistributionGuarantee
from .state_bounds import BoundReport

__all__ = ["BoundCurve", "InDistributionGuarantee", "BoundReport"]
__version__ = "0.1.0"
