"""Link-level Monte Carlo simulator for media-based modulation systems."""

__version__ = "0.1.0"

from .alphabet import ModulationAlphabet, build_alphabet
from .channel import (
    CorrelationSpec,
    NoiseSpec,
    RngStream,
    build_rrx,
    build_rtx,
    sample_correlated_channel,
    sample_iid_channel,
    sample_noise,
    snr_to_sigma2,
)
from .detect import (
    DetectionResult,
    ml_detect,
    pep_closed_form,
    precompute_rx_points,
    union_bound_bep,
    union_bound_curve,
)
from .errors import MbmSimError
from .harness import (
    BerCurve,
    BerPoint,
    SimConfig,
    SlopeEstimate,
    estimate_diversity,
    read_curve_csv,
    run_ber_sweep,
    snr_at_ber,
    write_curve_csv,
)
from .mapsel import (
    MapIndexSet,
    ed_select,
    feedback_bits_mapsel,
    mi_select,
    min_distance_sq,
    predicted_diversity_ed,
    predicted_diversity_mi,
    selection_matrix,
)
from .pccr import (
    PcCrCodebook,
    PhaseBook,
    build_codebook,
    build_phase_compensation,
    detect_pccr_scheme1,
    detect_pccr_scheme2,
    feedback_bits_pccr,
    phasebook_from_channel,
    predicted_diversity_pccr,
    quantize_phases,
    select_antenna_scheme1,
)
from .signalset import (
    SignalSet,
    SystemConfig,
    TransmitVector,
    bits_to_vector,
    build_activation_patterns,
    build_signal_set,
    rate,
    vector_to_bits,
)
from .tcm import ConvCode, build_code, tcm_encode, tcm_viterbi_decode

__all__ = [name for name in dir() if not name.startswith("_")]
