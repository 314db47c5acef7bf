"""protoinv - quantified inductive invariant inference for finite protocol instances."""

__version__ = "0.1.0"
