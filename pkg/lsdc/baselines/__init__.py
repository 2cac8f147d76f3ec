"""Init file for baselines module."""

from .kmeans import KMeansModel, kmeans

__all__ = ["KMeansModel", "kmeans"]
