"""
Tests for the Contraction Certificate Engine
"""
