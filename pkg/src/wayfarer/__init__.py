"""Multi-modal trip planner.

Plans door-to-door trips over a mode-labeled street/transit graph,
minimizing a preference-weighted monetary cost subject to user-declared
temporal constraints, with optional user-uploaded geographic metric
overlays (crime points, pollution samples, ...) folded into the cost.
"""

from wayfarer.errors import WayfarerError

__all__ = ["WayfarerError"]
__version__ = "0.1.0"
