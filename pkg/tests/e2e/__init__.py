# E2E Tests Package
"""
End-to-end tests for the battery-fdd command line
Runs the full offline pipeline on fixture telemetry
"""
