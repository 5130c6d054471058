"""Fast inverse square root: bit-exact kernels, minimax constant derivation
and exhaustive binary32 error verification."""

__version__ = "0.1.0"

from .bits import DomainError, MagicConstant, magic_to_t, t_to_magic  # noqa: E402
from .kernels import Arithmetic, KernelSpec, builtin_spec, run_kernel  # noqa: E402

__all__ = ["Arithmetic", "DomainError", "KernelSpec", "MagicConstant", "__version__",
           "builtin_spec", "magic_to_t", "run_kernel", "t_to_magic"]
