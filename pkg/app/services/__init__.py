# Services

