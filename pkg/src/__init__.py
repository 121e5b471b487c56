"""
NegBio - negation and uncertainty detection for findings in radiology reports,
by pattern matching over universal dependency graphs.
"""
