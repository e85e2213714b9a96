"""Exact computer algebra for the modular Lie superalgebras of odd Cartan type.

The package constructs HO(n), SHO(n), KO(n) and SKO(n, lambda) over a prime
field F_p (p > 5 is not required; any prime p > 3 works), classifies their
maximal graded subalgebras of types I, II and III-R, and checks every
closed-form dimension and count against brute-force computation.

Layers, bottom up:

* :mod:`oddcartan.exactlin`  -- deterministic linear algebra over F_p;
* :mod:`oddcartan.dpsuper`   -- the divided power superalgebra O(m, n);
* :mod:`oddcartan.algebras`  -- the four algebras, brackets, graded pieces;
* :mod:`oddcartan.sympspace` -- the symplectic superspace on L_{-1};
* :mod:`oddcartan.mgs`       -- maximal graded subalgebra catalogs;
* :mod:`oddcartan.cli`       -- the `oddcartan` command-line front end.
"""

__version__ = "0.1.0"

from oddcartan.algebras import (  # noqa: E402
    Algebra,
    GradedSubspace,
    WeightDecomposition,
    bracket,
    closed_form_dim,
    d_ho,
    delta_i,
    derived_subalgebra,
    div_lambda,
    divergence,
    gamma,
    generate_module,
    get_algebra,
    graded_component,
    laplacian,
    nabla,
    parse_descriptor,
    torus_basis,
    transitivity_check,
    weight_decomposition,
)

__all__ = [
    "Algebra",
    "GradedSubspace",
    "WeightDecomposition",
    "__version__",
    "bracket",
    "closed_form_dim",
    "d_ho",
    "delta_i",
    "derived_subalgebra",
    "div_lambda",
    "divergence",
    "gamma",
    "generate_module",
    "get_algebra",
    "graded_component",
    "laplacian",
    "nabla",
    "parse_descriptor",
    "torus_basis",
    "transitivity_check",
    "weight_decomposition",
]
