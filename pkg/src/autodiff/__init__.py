from .tensor import Tensor, Graph, Node, backward, ShapeError, NonFiniteError
from .gradcheck import finite_diff_check, GradCheckError
from .module import Module, Linear
from . import ops

__all__ = ['Tensor', 'Graph', 'Node', 'backward', 'ShapeError', 'NonFiniteError',
           'finite_diff_check', 'GradCheckError', 'Module', 'Linear', 'ops']
