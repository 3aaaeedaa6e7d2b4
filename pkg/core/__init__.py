"""
Core package for resochi
Exact arithmetic, lattices, resonance and contact analyses, models
"""
