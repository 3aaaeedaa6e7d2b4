"""
Test package for resochi
"""
