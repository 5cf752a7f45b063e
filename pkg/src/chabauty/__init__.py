"""Chabauty — closed subgroups of R, C and the Heisenberg group, and the distances between them."""
