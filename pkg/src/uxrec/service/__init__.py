from .app import AppComponents, create_app, load_components
from .config import AppConfig, load_config
from .sessions import ProjectSession
from .store import SessionStore

__all__ = [
    "AppComponents",
    "AppConfig",
    "ProjectSession",
    "SessionStore",
    "create_app",
    "load_components",
    "load_config",
]
