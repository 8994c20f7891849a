import numpy as np
import pytest

from vklab.multiplicity import FamilySpec, build_base_profile, flip


@pytest.fixture(scope="session")
def family_spec():
    return FamilySpec()


@pytest.fixture(scope="session")
def family_base(family_spec):
    return build_base_profile(family_spec)


@pytest.fixture(scope="session")
def family_members(family_spec, family_base):
    return [flip(family_base, family_spec, n) for n in range(1, 6)]


@pytest.fixture(scope="session", autouse=True)
def warm_interp_kernels():
    """Compile the numba interpolation kernels once, outside any timing."""
    from vklab.field2d import (angular_average_matrix, angular_average_scalar,
                               field_from_function, hessian_fd, rotate_pullback_scalar)

    f = field_from_function(lambda x, y: x * y, h=2.0 / 64, margin=0.1)
    rotate_pullback_scalar(f, 0.3)
    rotate_pullback_scalar(f, 0.3, order=1)
    angular_average_scalar(f, 8)
    angular_average_matrix(hessian_fd(f), 8)
