"""Shipped configuration presets."""
