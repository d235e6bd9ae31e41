# Test tools package
