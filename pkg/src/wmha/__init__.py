"""
wmha: construct and certify weak multiplier Hopf algebra structure with exact
arithmetic over Q(i).
"""

__version__ = "0.1.0"
