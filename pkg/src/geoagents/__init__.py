"""GeoJSON-native spatial analysis agents: operations, function catalog,
planner/worker orchestration and a task benchmark."""

from __future__ import annotations

__version__ = "0.1.0"
