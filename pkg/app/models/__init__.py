"""
Domain types: the lead lattice, timed labels, SMTS and MECS.
"""
