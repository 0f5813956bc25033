"""RIS placement for satellite-to-ground coverage enhancement.

A seedable simulator and optimizer that places reconfigurable intelligent
surfaces (RISs) on building facets to maximize satellite coverage for
non-line-of-sight ground users.  Submodules:

- ``scene``        random urban scene generation (PPP buildings, user grid)
- ``geom``         3D facet frames, RIS sites, line-of-sight blockage tests
- ``satellites``   dome-region satellite position generators
- ``channel``      cascaded RIS link physics and received-power matrices
- ``bound``        stochastic-geometry coverage lower bound (numeric)
- ``opt``          binary placement optimization (island-model GA, exhaustive)
- ``harness``      end-to-end experiment runner
- ``cli``          command-line entry point
"""

__version__ = "0.1.0"
