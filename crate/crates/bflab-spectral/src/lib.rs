//! Periodic grids, discrete Fourier calculus and Hölder-seminorm estimation:
//! the substrate the rest of the workspace computes on.

pub mod error;
pub mod fft;
pub mod field;
pub mod grid;
pub mod holder;
pub mod timegrid;

pub use error::{Result, SpectralError};
pub use fft::C64;
pub use field::SpectralField;
pub use grid::Grid;
pub use holder::{holder_seminorm, holder_seminorm_tensor, pair_policy};
pub use timegrid::{geometric_times, SpaceTimeField, DEFAULT_TIME_RATIO};

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_rejects_bad_parameters() {
        assert!(Grid::new(3, 64, 1.0).is_err());
        assert!(Grid::new(1, 48, 1.0).is_err());
        assert!(Grid::new(1, 8, 1.0).is_err());
        assert!(Grid::new(1, 64, 0.0).is_err());
    }

    #[test]
    fn wavenumbers_are_signed() {
        let g = Grid::standard(1, 16).unwrap();
        assert_eq!(g.signed_index(0), 0);
        assert_eq!(g.signed_index(1), 1);
        assert_eq!(g.signed_index(8), 8);
        assert_eq!(g.signed_index(9), -7);
        assert_eq!(g.signed_index(15), -1);
        assert!((g.wavenumber(1) - 1.0).abs() < 1e-15);
    }
}
