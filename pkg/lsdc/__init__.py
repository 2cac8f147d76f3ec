"""Init file for lsdc."""
