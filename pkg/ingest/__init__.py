# Ingest module initialization
