"""Integration tests for pylandmark

End-to-end pipeline runs on generated corpora. These are marked slow.
"""
