"""Level-set surface reconstruction from point clouds with fast SIM and ALM solvers"""

__version__ = "0.1.0"
