"""Desk-scale Fraisse limits, stationary independence and Katetov towers."""
