"""HTTP service, session runtime, scenario simulator and CLI."""

from .app import create_app
from .config import ServiceConfig, load_config
from .sessions import Session, SessionManager, World, build_world, load_model
from .simulate import (
    CaseResult,
    SimulationReport,
    load_scenarios,
    render_report,
    run_scenarios,
)

__all__ = [
    "CaseResult",
    "ServiceConfig",
    "Session",
    "SessionManager",
    "SimulationReport",
    "World",
    "build_world",
    "create_app",
    "load_config",
    "load_model",
    "load_scenarios",
    "render_report",
    "run_scenarios",
]
