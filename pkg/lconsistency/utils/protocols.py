import inspect
from typing import List


def get_positional_parameters(
    signature: inspect.Signature, n: int
) -> List[inspect.Parameter]:
    parameters = list(signature.parameters.values())[:n]
    if len(parameters) < n:
        raise TypeError(f'signature needs {n} positional arguments')
    return parameters
