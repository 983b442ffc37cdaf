//! ML-ready tile sets: fixed-size crops with a strict validity rule,
//! spatial-jitter augmentation of plume tiles, image-level splits and the
//! JSON-lines tile manifest.

mod jitter;
mod manifest;
mod split;
mod tile;

pub use jitter::{jitter_tiles, JitterSpec};
pub use manifest::{read_manifest, write_manifest, write_tile_shards, TileRecord};
pub use split::{split_images, Split, SplitManifest, SplitMode, DEFAULT_FRACTIONS};
pub use tile::{
    max_enhancement, strong_flag, tile_label, tile_origins, tile_raster, Tile, TileParams, TileSource,
    DEFAULT_MIN_VALID_FRAC, DEFAULT_STRONG_THRESHOLD_PPM_M, DEFAULT_TILE_SIZE,
};
