"""Sosie synthesis over MiniLang programs.

Statement-level transformations (add, replace, delete; random, wittgenstein,
reaction and steroid transplant selection) produce program variants; those
that still pass the test suite are sosies. Their computational diversity is
measured by comparing call and data traces with the original.
"""

__version__ = "0.1.0"
