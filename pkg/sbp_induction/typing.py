from typing import Callable
from typing import Union

import numpy as np
import numpy.typing as npt

ScalarGridFn = npt.NDArray[np.float64]
VectorGridFn = npt.NDArray[np.float64]
Coordinate = Union[float, npt.NDArray[np.float64]]

# (t, x, y, z) -> array of shape (3, *x.shape)
FieldEvaluator = Callable[[float, Coordinate, Coordinate, Coordinate], VectorGridFn]
RhsFunction = Callable[[float, VectorGridFn], VectorGridFn]
LinearOperator = Callable[[npt.NDArray[np.float64]], npt.NDArray[np.float64]]
InnerProduct = Callable[[npt.NDArray[np.float64], npt.NDArray[np.float64]], float]
