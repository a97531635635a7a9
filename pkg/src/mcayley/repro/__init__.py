"""Named constructions, censuses and the degree-6 overgroup table."""
