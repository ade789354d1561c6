# Integration Tests
"""
Integration tests for the describe, retrieve, vote and generate stages working together.
"""
