"""Exact idal calculus on finitely presented modules over polynomial rings."""

from .polyring import (
    QQ,
    GF,
    BaseField,
    FreeVector,
    Poly,
    PolyRing,
    RingHom,
    divide_with_cofactors,
    groebner,
    normal_form,
    syzygies,
)
from .fpmod import (
    ChainColimitResult,
    HomModule,
    ModuleMap,
    PresentedModule,
    chain_colimit,
    cokernel,
    direct_sum,
    free_module,
    graded_dim,
    hom_module,
    invert_iso,
    is_iso,
    is_zero,
    kernel,
    pullback,
    pushout,
    symtrivial_check,
    tensor,
    tensor_map,
    tensor_power,
    unit_module,
    zero_module,
)
from .idal import (
    Idal,
    IdalMorphism,
    cover_check,
    cover_check_pushout,
    free_idal_hom_size,
    idal_base_change,
    idal_check,
    idal_from_ideal,
    idal_power,
    idal_product,
    idal_reflect,
    nilpotency_check,
)
from .localize import (
    DeligneHomResult,
    ReflectorResult,
    believes,
    canonical_to_hom,
    deligne_hom,
    idal_comparison_search,
    intersection_check,
    localization_oracle,
    quotient_functor,
    reflect,
)
from .glued import (
    GluedMap,
    GluedModule,
    SelfGlueTau,
    TwoChartScheme,
    chart_idal,
    doubleorigin2_datum_check,
    doubleorigin_datum_check,
    dualizable_check,
    global_sections,
    glue,
    hom_glued,
    idal_generation,
    inverse_of,
    invertible_check,
    o_glued,
    p1_scheme,
    p1_sections_oracle,
    p1_standard,
    projline_datum_check,
    roundtrip_check,
    symtrivial_check_glued,
    tensor_glued,
)

__all__ = [name for name in dir() if not name.startswith("_")]
