"""Domain services: linear algebra, POVM construction, entanglement criteria."""
