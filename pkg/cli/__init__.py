"""
Command-line package for resochi
Argument parsing and the batch commands
"""
