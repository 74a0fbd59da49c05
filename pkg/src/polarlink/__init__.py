"""polarlink: polar-code construction, simulation, and media-transmission toolkit."""

from .channels import (
    LLR_MAX,
    AwgnBpsk,
    Bec,
    ChannelSpec,
    Observation,
    RayleighBpsk,
    llr,
    modulate_bpsk,
    sigma2_to_snr_db,
    snr_db_to_sigma2,
    transmit,
)
from .construction import (
    ConditionalDensityPair,
    RecursionRule,
    Z0Policy,
    awgn_density_pair,
    bhattacharyya_numeric,
    construct_code,
    evolve,
    initial_z,
    initial_z_awgn,
    initial_z_rayleigh,
    rate_to_k,
    rayleigh_density_pair,
    select_information_set,
    union_bound,
)
from .ldpc import (
    LdpcCode,
    LdpcConstructionError,
    bp_decode,
    bp_decode_batch,
    export_alist,
    generate_regular_ldpc,
    import_alist,
    ldpc_encode,
)
from .media import (
    GrayImage,
    PcmSignal,
    bits_to_image,
    bits_to_pcm,
    image_to_bits,
    pack_stream,
    pcm_to_bits,
    psnr,
    read_pgm,
    read_wav,
    spectral_distortion,
    unpack_stream,
    write_pgm,
    write_wav,
)
from .polar import CodeConfig, encode, encode_split, generator_matrix
from .sc_decoder import ScDecoder, sc_decode
from .seeding import derive_seed, make_rng, splitmix64
from .simulate import (
    SimRecord,
    SweepConfig,
    run_ber_sweep,
    run_media_pipeline,
    run_rule_comparison,
    write_rules_csv,
    write_sweep_csv,
)

__version__ = "0.1.0"
