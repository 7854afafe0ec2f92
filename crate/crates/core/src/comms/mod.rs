//! Radar-to-IRS antenna encoding and IRS-to-radar on-off keying.

mod decode;
mod link;
mod multi;
mod ook;
mod packet;
mod radar_tx;

pub use decode::{bit_levels, decode_bits, sync_align, sync_candidates, BitTiming, SyncConfig, BIT_ZERO_RATIO};
pub use link::{
    ber_vs_distance, noise_sigma_for_snr, EnvelopeTrace, IrsFrontEnd, LinkBerSetup, RadarLink, Transmission,
    DEFAULT_MCU_RATE_HZ, DEFAULT_TX2_GAIN,
};
pub use multi::{detect_radars, separate_radar, DetectConfig};
pub use ook::{chirp_magnitudes_at_range, ook_demodulate, ook_modulate, slot_levels, OokLevels};
pub use packet::{
    bits_from_str, bits_to_string, deframe_packet, frame_packet, payload_from_u8, payload_to_u8, PacketFormat,
    PAYLOAD_BITS,
};
pub use radar_tx::{data_rate, encode_radar_bits, RadarTxPlan, TxAntenna, TxSegment, DEFAULT_MAX_SWITCHING_HZ};
