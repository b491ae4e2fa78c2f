# Metrics module initialization
