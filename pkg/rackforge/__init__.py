"""
rackforge - Leibniz algebras, Lie racks and their dirty integration
"""

__version__ = "0.1.0"
__author__ = "rackforge Team"
__description__ = "Leibniz algebra analysis, rack constructions and pullback-rack integration"
