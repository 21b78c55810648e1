"""File-backed repositories: datasets, ensembles and reports."""
