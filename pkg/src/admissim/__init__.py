"""Elective-surgery admission scheduling simulator.

Weekly admission scheduling against predicted lengths of stay, daily
schedule repair with four policies (postpone / change ward / transfer /
combined), controlled prediction-error injection, and a sweep harness
over error scenarios.
"""

__version__ = "0.1.0"
