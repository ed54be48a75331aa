"""
Tests for the multicomponent DG solver scripts.
"""
