from ._core_types import FloatArray, IntArray, BoolArray, ParamDict

__all__ = ["FloatArray", "IntArray", "BoolArray", "ParamDict"]
