#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
resochi - Resonances and Mean Euler Characteristics
Main entry point for the command line
"""

import sys

from cli.commands import run


def main():
    """Main function: run one command and exit with its code"""
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
