"""allocsim: housing-allocation mechanisms under impartial culture."""
__version__ = "0.1.0"
