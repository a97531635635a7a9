"""m-Cayley digraphs, their normalizers, automorphism groups and CI checks."""
