"""
Biofilm Electrochemical Signalling Simulator - Core Package

A deterministic one-dimensional simulator of potassium-wave signalling in a
growing bacterial biofilm. Stimulation at the biofilm interior (glutamate
supply, potassium impulses or pulse trains) is propagated by the method of
lines and classical RK4, and probe time series, space-time fields and signal
metrics are written out.

Installation:
    pip install -e ".[dev]"

Usage:
    from scenario import preset
    from integrator import run

    trajectory = run(preset("impulse"))
"""

__version__ = "1.0.0"
__author__ = "Biofilm Signalling Team"
