"""Experiment presets, configuration files and CSV output."""
