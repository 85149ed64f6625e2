"""Trajectory planning through unions of convex safe sets.

The toolkit models motion planning as a shortest-path problem over a graph
whose vertices are convex regions of configuration space.  A tight convex
relaxation of the (mixed-integer) path problem is solved with an interior
point method, a randomized depth-first search rounds the fractional flows
into candidate paths, and the winning path is decoded into a smooth Bezier
trajectory with its own time-scaling.
"""

from gcsplan.geometry import ConvexSet
from gcsplan.bezier import BezierCurve
from gcsplan.gcs import GcsProblem, EdgeLength, EdgeConstraint, FlowSolution
from gcsplan.rounding import RoundingConfig, RoundingReport
from gcsplan.planner import PlanningSpec, Trajectory

__all__ = [
    "ConvexSet",
    "BezierCurve",
    "GcsProblem",
    "EdgeLength",
    "EdgeConstraint",
    "FlowSolution",
    "RoundingConfig",
    "RoundingReport",
    "PlanningSpec",
    "Trajectory",
]

__version__ = "0.1.0"
