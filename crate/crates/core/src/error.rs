use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("hexagon radius must be positive and finite, got {0}")]
    InvalidRadius(f64),
    #[error("altitude bounds must satisfy 0 < h_min <= h_max, got [{h_min}, {h_max}]")]
    InvalidAltitudeBounds { h_min: f64, h_max: f64 },
    #[error("no lattice pitch yields exactly {target_count} candidate points in the region")]
    NoLatticePitch { target_count: usize },
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ChannelError {
    #[error("transmitter height {h_b} m must exceed receiver height {h_k} m")]
    TransmitterNotElevated { h_b: f64, h_k: f64 },
    #[error("link distance must be positive, got {0} m")]
    NonPositiveDistance(f64),
    #[error("path loss exponent {exponent} at altitude {altitude} m is outside (1, 8]")]
    ExponentOutOfRange { exponent: f64, altitude: f64 },
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NetworkError {
    #[error("user {user} has demand {demand} bps but a zero rate")]
    ZeroRate { user: usize, demand: f64 },
    #[error(transparent)]
    Channel(#[from] ChannelError),
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("invalid configuration: {0}")]
    Invalid(String),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("failed to parse configuration: {0}")]
    Parse(#[from] toml::de::Error),
}

#[derive(Debug, Error)]
pub enum SimError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Network(#[from] NetworkError),
    #[error(transparent)]
    Channel(#[from] ChannelError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("serialization error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("serialization error: {0}")]
    Toml(#[from] toml::ser::Error),
}
