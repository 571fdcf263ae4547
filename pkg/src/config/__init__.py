"""Configuration management for gesturebench."""

from src.config.settings import ModelSection, Settings, load_env, load_settings, save_settings

__all__ = ["ModelSection", "Settings", "load_env", "load_settings", "save_settings"]
