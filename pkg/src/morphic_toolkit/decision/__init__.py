"""Decision procedures and their certificates."""
