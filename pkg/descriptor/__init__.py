from .system import (Source, ConstantSource, PolySource, SampledSource, CallableSource, as_source,
                     DescriptorSystem, RhsPair, RhsSource, AdjointElement)
from .operator import (membership_W2F, apply_D, residual_integral_form, membership_adjoint, apply_D_adjoint,
                       boundary_bracket, ibp_residual, adjoint_pairing_residual)
from .catalog import example1_system, example1_rhs, example2_system, example2_reduced_system
