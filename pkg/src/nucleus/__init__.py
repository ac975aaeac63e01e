"""Parallel (r, s) nucleus decomposition with hierarchy construction."""
