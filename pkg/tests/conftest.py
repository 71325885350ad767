# Keeps the tests directory importable so test modules can share the
# reference implementations in reference_impls.py.
