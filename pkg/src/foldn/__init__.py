"""foldn: a proof assistant for an intuitionistic meta-logic with
simply-typed lambda-term syntax, partial inductive definitions, and
natural-number induction."""

__version__ = "0.1.0"
