from ._dtwin import (
    Error,
    Graph,
    analyze_dynamics,
    analyze_plc,
    ari,
    dtw_distance,
    evaluate,
    export_aml,
    generate,
    import_aml,
    mark_templates,
    merge,
    mine,
    mini_plantspec,
    pairwise_f1,
    full_plantspec,
    run_all,
    validate_aml,
)

__all__ = [
    "Error",
    "Graph",
    "analyze_dynamics",
    "analyze_plc",
    "ari",
    "dtw_distance",
    "evaluate",
    "export_aml",
    "generate",
    "import_aml",
    "mark_templates",
    "merge",
    "mine",
    "mini_plantspec",
    "pairwise_f1",
    "full_plantspec",
    "run_all",
    "validate_aml",
]
