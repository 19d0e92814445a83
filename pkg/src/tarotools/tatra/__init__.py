"""
Tatra association schemes: construction, structural verification, automorphism and isomorphism groups,
algebraic automorphisms and the separability certificate of the schemes X(q, n).
"""

__version__ = "0.1.0"
