# Utilities module initialization
