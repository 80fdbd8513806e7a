"""Exact event-driven simulation and region analysis for delayed
all-to-all pulse-coupled oscillator networks."""

from ._version import __version__
from .model import (
    DomainError,
    ModelParams,
    jump,
    jump_coeffs,
    jump_m,
    response,
    rise,
    rise_inv,
    trigger_threshold,
)
from .engine import (
    COINCIDENCE_TOL,
    Engine,
    EngineStallError,
    HorizonExceededError,
    NetworkState,
    PendingPulse,
    StateError,
    TraceEvent,
    format_trace_jsonl,
    format_trace_text,
    init_engine,
    is_section_state,
    network_state,
    validate_state,
)
from .poincare import (
    DEFAULT_MATCH_TOL,
    NotPeriodic,
    PeriodicityResult,
    PulseSignature,
    SectionError,
    detect_periodicity,
    phase_projection,
    poincare_map,
    pulse_equivalent,
    pulse_signature,
    require_section_state,
    state_distance,
    states_match,
)
from .regions import (
    EXPECTED_PERIOD_DELAYS,
    EXPECTED_POINCARE_PERIOD,
    KINDS,
    AffineMap,
    Functional,
    OracleReport,
    RegionSpec,
    VolumeReport,
    exists_ir3,
    exists_ir4,
    exists_ir5,
    g_algebra,
    g_map,
    ir3_center,
    ir3_spec,
    ir4_center,
    ir4_projection_contains,
    ir4_spec,
    cycle_state,
    ir5_center,
    ir5_spec,
    membership,
    membership_many,
    membership_margin,
    region_center,
    region_exists,
    region_oracle,
    region_spec,
    region_volume,
    s_embed,
    s_embed_ir3,
    s_embed_ir4,
    s_embed_ir5,
    sample_interior,
)
from .sweep import (
    DEFAULT_SCAN_MAX_ITER,
    DEFAULT_SCAN_STEP,
    EscapeReport,
    ParamScanRecord,
    ParamScanResult,
    PhaseScanResult,
    ProjectionCompareReport,
    ScanRecord,
    StabilityFailure,
    StabilityReport,
    boundary_escape_demo,
    dataset_header,
    emit_param_scan_plot,
    emit_phase_scan_plot,
    emit_projection_plot,
    eq_init_state,
    param_scan,
    phase_scan,
    projection_compare,
    stability_probe,
    write_param_scan_csv,
    write_param_scan_json,
    write_phase_scan_csv,
    write_phase_scan_json,
    write_projection_csv,
    write_projection_json,
)

__all__ = [
    "AffineMap",
    "COINCIDENCE_TOL",
    "DEFAULT_MATCH_TOL",
    "DEFAULT_SCAN_MAX_ITER",
    "DEFAULT_SCAN_STEP",
    "DomainError",
    "EXPECTED_PERIOD_DELAYS",
    "EXPECTED_POINCARE_PERIOD",
    "Engine",
    "EngineStallError",
    "EscapeReport",
    "Functional",
    "HorizonExceededError",
    "KINDS",
    "ModelParams",
    "NetworkState",
    "NotPeriodic",
    "OracleReport",
    "ParamScanRecord",
    "ParamScanResult",
    "PendingPulse",
    "PeriodicityResult",
    "PhaseScanResult",
    "ProjectionCompareReport",
    "PulseSignature",
    "RegionSpec",
    "ScanRecord",
    "SectionError",
    "StabilityFailure",
    "StabilityReport",
    "StateError",
    "TraceEvent",
    "VolumeReport",
    "__version__",
    "boundary_escape_demo",
    "cycle_state",
    "dataset_header",
    "detect_periodicity",
    "emit_param_scan_plot",
    "emit_phase_scan_plot",
    "emit_projection_plot",
    "eq_init_state",
    "exists_ir3",
    "exists_ir4",
    "exists_ir5",
    "format_trace_jsonl",
    "format_trace_text",
    "g_algebra",
    "g_map",
    "init_engine",
    "ir3_center",
    "ir3_spec",
    "ir4_center",
    "ir4_projection_contains",
    "ir4_spec",
    "ir5_center",
    "ir5_spec",
    "is_section_state",
    "jump",
    "jump_coeffs",
    "jump_m",
    "membership",
    "membership_many",
    "membership_margin",
    "network_state",
    "param_scan",
    "phase_projection",
    "phase_scan",
    "poincare_map",
    "projection_compare",
    "pulse_equivalent",
    "pulse_signature",
    "region_center",
    "region_exists",
    "region_oracle",
    "region_spec",
    "region_volume",
    "require_section_state",
    "response",
    "rise",
    "rise_inv",
    "s_embed",
    "s_embed_ir3",
    "s_embed_ir4",
    "s_embed_ir5",
    "sample_interior",
    "stability_probe",
    "state_distance",
    "states_match",
    "trigger_threshold",
    "validate_state",
    "write_param_scan_csv",
    "write_param_scan_json",
    "write_phase_scan_csv",
    "write_phase_scan_json",
    "write_projection_csv",
    "write_projection_json",
]
