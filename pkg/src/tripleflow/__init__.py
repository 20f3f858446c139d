"""Diffuse-interface simulator for two fluids and a reacting solid phase.

A structured staggered-grid implementation of a three-phase interface model:
two immiscible fluids plus a solid that dissolves and precipitates in
response to a transported ion concentration.  See the README for the model
summary, the CLI and the verification scenarios.
"""

__version__ = "0.1.0"
