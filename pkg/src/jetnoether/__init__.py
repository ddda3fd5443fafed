"""Symbolic Noether correspondence on finite-order jet spaces."""
from .errors import (
    ContextMismatch,
    JetError,
    ParseError,
    PreconditionError,
    SolverBoundsExhausted,
    TruncationError,
    VerificationError,
)
from .expr import Coordinate, Expr, Parameter, equals, evaluate, parse_expr, partial_derivative
from .forms import (
    BasisOneForm,
    Form,
    bidegree,
    exterior_derivative,
    interior_product,
    is_holonomic,
    is_proper,
    lagrangian_part,
    to_contact_basis,
    wedge,
)
from .jet import JetContext, iterated_total_derivative, lex_compare, make_context, total_derivative
from .models import Model, load_model
from .noether import (
    Certificate,
    Current,
    InverseResult,
    Triviality,
    classify_trivial,
    divergence,
    forward_noether,
    inverse_noether,
    inverse_noether_for_lagrangian,
    verify_conservation,
)
from .symmetry import (
    Generator,
    JetVectorField,
    d_symmetry_residual,
    is_weak_symmetry,
    lie_derivative_form,
    prolong,
)
from .variational import (
    Lagrangian,
    ProlongedSystem,
    RankReport,
    SourceForm,
    euler_lagrange,
    is_poincare_cartan,
    poincare_cartan,
    prolonged_system,
    regularity_probe,
)

__all__ = [
    "BasisOneForm",
    "Certificate",
    "ContextMismatch",
    "Coordinate",
    "Current",
    "Expr",
    "Form",
    "Generator",
    "InverseResult",
    "JetContext",
    "JetError",
    "JetVectorField",
    "Lagrangian",
    "Model",
    "Parameter",
    "ParseError",
    "PreconditionError",
    "ProlongedSystem",
    "RankReport",
    "SolverBoundsExhausted",
    "SourceForm",
    "Triviality",
    "TruncationError",
    "VerificationError",
    "bidegree",
    "classify_trivial",
    "d_symmetry_residual",
    "divergence",
    "equals",
    "euler_lagrange",
    "evaluate",
    "exterior_derivative",
    "forward_noether",
    "interior_product",
    "inverse_noether",
    "inverse_noether_for_lagrangian",
    "is_holonomic",
    "is_poincare_cartan",
    "is_proper",
    "is_weak_symmetry",
    "iterated_total_derivative",
    "lagrangian_part",
    "lex_compare",
    "lie_derivative_form",
    "load_model",
    "make_context",
    "parse_expr",
    "partial_derivative",
    "poincare_cartan",
    "prolong",
    "prolonged_system",
    "regularity_probe",
    "to_contact_basis",
    "total_derivative",
    "verify_conservation",
    "wedge",
]
