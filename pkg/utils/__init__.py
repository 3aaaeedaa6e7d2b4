"""
Utils package for resochi
Contains constants, logging, validation and formatting helpers
"""
