from typing import Any

import numpy as np
from numpy.typing import NDArray

FloatArray = NDArray[np.floating[Any]]
IntArray = NDArray[np.integer[Any]]
BoolArray = NDArray[np.bool_]

# Named parameter arrays of a trainable block, e.g. {"W": ..., "b": ...}.
ParamDict = dict[str, FloatArray]
