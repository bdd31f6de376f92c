"""Distribution-function fields over generalized phase space: marginals,
mean kinematical values, moment tensors, chain evolution steps, and the
H / negative-probability diagnostics."""

from ._kinchain import *  # noqa: F401,F403
from ._kinchain import __doc__ as _core_doc  # noqa: F401
